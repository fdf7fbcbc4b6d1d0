//! Suffix array and LCP array over integer alphabets.

/// Suffix array of `text` by prefix doubling with counting sorts,
/// O(n log n). Symbols must be `< alphabet`.
pub fn suffix_array(text: &[u32], alphabet: usize) -> Vec<u32> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(n < u32::MAX as usize, "text too long for u32 suffix array");

    let mut sa: Vec<u32> = vec![0; n];
    let mut counts = vec![0u32; alphabet.max(n) + 1];

    // initial sort by first symbol
    for &c in text {
        counts[c as usize] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        let v = *c;
        *c = sum;
        sum += v;
    }
    for (i, &c) in text.iter().enumerate() {
        sa[counts[c as usize] as usize] = i as u32;
        counts[c as usize] += 1;
    }
    // dense ranks
    let mut rank = vec![0u32; n];
    let mut classes = 0u32;
    for j in 0..n {
        if j > 0 && text[sa[j] as usize] != text[sa[j - 1] as usize] {
            classes += 1;
        }
        rank[sa[j] as usize] = classes;
    }
    classes += 1;

    let mut second: Vec<u32> = vec![0; n];
    let mut next_rank: Vec<u32> = vec![0; n];
    let mut k = 1usize;
    while (classes as usize) < n {
        // order by second key: suffixes whose second half is empty come first
        let mut w = 0;
        for i in n.saturating_sub(k)..n {
            second[w] = i as u32;
            w += 1;
        }
        for &p in &sa {
            if p as usize >= k {
                second[w] = p - k as u32;
                w += 1;
            }
        }
        // stable counting sort by first key
        let cnt = &mut counts[..classes as usize + 1];
        cnt.iter_mut().for_each(|c| *c = 0);
        for &r in &rank {
            cnt[r as usize + 1] += 1;
        }
        for c in 1..cnt.len() {
            cnt[c] += cnt[c - 1];
        }
        for &p in &second {
            let r = rank[p as usize] as usize;
            sa[cnt[r] as usize] = p;
            cnt[r] += 1;
        }
        // re-rank
        let key = |p: u32| {
            let p = p as usize;
            let hi = if p + k < n { rank[p + k] as i64 } else { -1 };
            (rank[p], hi)
        };
        let mut c = 0u32;
        next_rank[sa[0] as usize] = 0;
        for j in 1..n {
            if key(sa[j]) != key(sa[j - 1]) {
                c += 1;
            }
            next_rank[sa[j] as usize] = c;
        }
        std::mem::swap(&mut rank, &mut next_rank);
        classes = c + 1;
        k *= 2;
    }
    sa
}

/// Kasai's algorithm. `lcp[i]` is the longest common prefix of the suffixes
/// at `sa[i-1]` and `sa[i]`; `lcp[0] = 0`.
pub fn lcp_array(text: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0u32; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p as usize] = i as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for p in 0..n {
        let r = rank[p] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let q = sa[r - 1] as usize;
        while p + h < n && q + h < n && text[p + h] == text[q + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}
