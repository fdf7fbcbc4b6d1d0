//! Acceptance suite. Runs every criterion, prints one line per criterion
//! with its runtime, and exits non-zero on any unexpected result.
//!
//! `cargo test -p langsuit --test acceptance`

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use langsuit::analyze::{self, emit_report, Cell, ReportFormat, Table};
use langsuit::cli::{cmd_suitability, RunConfig};
use langsuit::clone::{detect_cross_clones, CloneParams};
use langsuit::corpus::{self, Corpus, CorpusDocument, LoadOptions, Split};
use langsuit::embed::{self, EmbedConfig, EmbeddingModel, NgramKey, Vocab};
use langsuit::metrics::{self, EvalPair, MeteorConfig, PerfTimeRecord, RankedQuery};
use langsuit::select;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------

const PUBLISHED: [(&str, f64); 5] = [
    ("python", 0.55),
    ("php", 0.92),
    ("java", 0.14),
    ("javascript", 0.52),
    ("go", 0.46),
];
const PROSE_SELECTION: [&str; 3] = ["python", "php", "go"];

fn published_scores() -> Check {
    let scores: BTreeMap<String, f64> = PUBLISHED.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    // combined scores go in as both halves, so the mean returns them unchanged
    let report = select::suitability(&scores, &scores, 0.5).map_err(|e| e.to_string())?;
    for row in &report.rows {
        ensure(row.suitability == scores[&row.language], || {
            format!("{}: suitability {} != {}", row.language, row.suitability, scores[&row.language])
        })?;
    }
    let selected: BTreeSet<&str> = report.selected().into_iter().collect();
    let expected: BTreeSet<&str> = PUBLISHED.iter().filter(|(_, v)| *v >= 0.5).map(|(k, _)| *k).collect();
    ensure(selected == expected, || format!("selected {selected:?}, expected {expected:?}"))?;
    let d = report.compare_selection(&PROSE_SELECTION);
    ensure(!d.is_consistent(), || "prose selection discrepancy was not flagged".into())?;
    ensure(
        d.claimed_not_selected == ["go"] && d.selected_not_claimed == ["javascript"],
        || format!("unexpected discrepancy {d:?}"),
    )?;
    Ok(format!("selected {selected:?}; flagged: {d}"))
}

// ---------------------------------------------------------------------------

/// Documents `<lang><index>`; every document must be non-empty.
fn to_corpus(lang: &str, docs: &[Vec<String>]) -> Corpus {
    let out = docs
        .iter()
        .enumerate()
        .map(|(i, d)| CorpusDocument::new(format!("{lang}{i}"), lang, Split::Unsplit, d.join(" ")))
        .collect();
    Corpus::new(lang, out).expect("valid corpus")
}

fn clone_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    let mut total_pairs = 0;
    let mins = [3, 5, 8];
    while done < 200 {
        let (a, b) = common::random_clone_corpora(&mut rng, 2000);
        let a: Vec<Vec<String>> = a.into_iter().filter(|d| !d.is_empty()).collect();
        let b: Vec<Vec<String>> = b.into_iter().filter(|d| !d.is_empty()).collect();
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let total: usize = a.iter().chain(&b).map(Vec::len).sum();
        ensure(total <= 2000, || format!("generated {total} tokens"))?;
        let min = mins[done % 3];
        let ca = to_corpus("a", &a);
        let cb = to_corpus("b", &b);
        let got = detect_cross_clones(&ca, &cb, &CloneParams::with_min_tokens(min)).map_err(|e| e.to_string())?;
        ensure(!got.truncated, || "result truncated".into())?;
        let got: BTreeSet<(String, usize, String, usize, usize)> = got
            .pairs
            .iter()
            .map(|p| (p.a.doc_id.clone(), p.a.start, p.b.doc_id.clone(), p.b.start, p.a.len))
            .collect();
        let want: BTreeSet<(String, usize, String, usize, usize)> = common::naive_clone_pairs(&a, &b, min)
            .into_iter()
            .map(|(ad, as_, bd, bs, l)| (format!("a{ad}"), as_, format!("b{bd}"), bs, l))
            .collect();
        ensure(got == want, || {
            format!(
                "corpus {done} (min {min}): {} pairs, oracle {}; first difference {:?}",
                got.len(),
                want.len(),
                got.symmetric_difference(&want).next()
            )
        })?;
        total_pairs += want.len();
        done += 1;
    }
    Ok(format!("200 corpora, {total_pairs} maximal pairs, all equal to the oracle"))
}

// ---------------------------------------------------------------------------

/// Average of the in-vocabulary unigram, bigram and trigram vectors.
fn oracle_embedding(model: &EmbeddingModel, words: &[String]) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; model.dim];
    let mut n = 0usize;
    for i in 0..words.len() {
        for len in 1..=3 {
            if i + len > words.len() {
                break;
            }
            if let Some(v) = model.lookup(&words[i..i + len].join(" ")) {
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += *x as f64);
                n += 1;
            }
        }
    }
    (n > 0).then(|| acc.into_iter().map(|x| x / n as f64).collect())
}

fn closed_form_cosine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let dim = rng.gen_range(2..=16);
        let words = rng.gen_range(2..12);
        let mut keys: Vec<NgramKey> = (0..words).map(|w| NgramKey(vec![format!("w{w}")])).collect();
        for _ in 0..rng.gen_range(0..6) {
            let len = rng.gen_range(2..=3);
            let k = NgramKey((0..len).map(|_| format!("w{}", rng.gen_range(0..words))).collect());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let n = keys.len();
        let model = EmbeddingModel {
            dim,
            vocab: Vocab::from_keys(keys).map_err(|e| e.to_string())?,
            vectors: (0..n * dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect(),
            config: EmbedConfig {
                dim,
                ..Default::default()
            },
        };
        let corpus_of = |lang: &str, rng: &mut ChaCha8Rng| -> (Corpus, Vec<Vec<f64>>) {
            let docs: Vec<Vec<String>> = (0..rng.gen_range(1..=20))
                .map(|_| {
                    (0..rng.gen_range(1..10))
                        // words past the vocabulary are out-of-vocabulary
                        .map(|_| format!("w{}", rng.gen_range(0..words + 3)))
                        .collect()
                })
                .collect();
            let vecs = docs.iter().filter_map(|d| oracle_embedding(&model, d)).collect();
            (to_corpus(lang, &docs), vecs)
        };
        let (ca, va) = corpus_of("a", &mut rng);
        let (cb, vb) = corpus_of("b", &mut rng);
        let fast = embed::semantic_similarity(&model, &ca, &cb);
        let nonzero = |v: &Vec<Vec<f64>>| v.iter().filter(|x| x.iter().any(|&c| c != 0.0)).count();
        if nonzero(&va) == 0 || nonzero(&vb) == 0 {
            ensure(fast.is_err(), || format!("case {case}: expected an error without embeddable documents"))?;
            continue;
        }
        let fast = fast.map_err(|e| format!("case {case}: {e}"))?;
        let brute = common::brute_mean_pairwise_cosine(&va, &vb);
        worst = worst.max((fast - brute).abs());
        ensure((fast - brute).abs() <= 1e-9, || {
            format!("case {case}: closed form {fast} vs brute force {brute}")
        })?;
    }
    Ok(format!("500 corpus pairs, max |diff| = {worst:.2e}"))
}

// ---------------------------------------------------------------------------

fn metric_fixtures() -> Check {
    let p = EvalPair::from_text("the cat sat", "the cat sat down");
    let b1 = metrics::bleu(&[p], 1).map_err(|e| e.to_string())?;
    ensure((b1 - 71.65).abs() <= 0.01, || format!("BLEU-1 {b1}"))?;

    let same = EvalPair::from_text("return the sum of two numbers", "return the sum of two numbers");
    let b4 = metrics::bleu(&[same], 4).map_err(|e| e.to_string())?;
    ensure(b4 == 100.0, || format!("BLEU identical {b4}"))?;

    let m = metrics::meteor_pair(&EvalPair::from_text("add numbers", "add numbers"), &MeteorConfig::default());
    ensure((m - 0.9375).abs() <= 1e-6, || format!("METEOR {m}"))?;

    let q = |r| RankedQuery {
        qid: String::new(),
        candidates: metrics::DEFAULT_CANDIDATES,
        rank: Some(r),
    };
    let mrr = metrics::mrr(&[q(1), q(2), q(4)]).map_err(|e| e.to_string())?;
    // 0.58333 is 7/12 printed to five places
    ensure((mrr - 7.0 / 12.0).abs() <= 1e-9, || format!("MRR {mrr}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..1000 {
        let na = rng.gen_range(1..30);
        let nb = rng.gen_range(1..30);
        let levels = rng.gen_range(1..20);
        let mut sample = |n| -> Vec<f64> { (0..n).map(|_| rng.gen_range(0..levels) as f64).collect() };
        let (a, b) = (sample(na), sample(nb));
        let r = metrics::mann_whitney_u(&a, &b).map_err(|e| e.to_string())?;
        ensure((r.u_a + r.u_b - (na * nb) as f64).abs() < 1e-9, || {
            format!("sample {i}: U_a + U_b = {} != {}", r.u_a + r.u_b, na * nb)
        })?;
    }

    let (worst, at) = normal_vs_exact_p()?;
    ensure(worst <= 0.05, || {
        format!(
            "all other fixtures pass; normal-approximation p misses the exact permutation p by {worst:.4} at sizes {at:?} (tolerance 0.05)"
        )
    })?;
    Ok(format!("BLEU-1 {b1:.4}, METEOR {m}, MRR {mrr:.9}, worst normal-vs-exact p gap {worst:.4}"))
}

/// Largest |p_normal - p_exact| over random samples of every size pair with
/// |a| + |b| <= 12.
fn normal_vs_exact_p() -> Result<(f64, (usize, usize)), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = (0.0, (0, 0));
    for na in 1..12 {
        for nb in 1..=12 - na {
            for _ in 0..20 {
                let levels = rng.gen_range(2..20);
                let mut sample = |n| -> Vec<f64> { (0..n).map(|_| rng.gen_range(0..levels) as f64).collect() };
                let (a, b) = (sample(na), sample(nb));
                let r = metrics::mann_whitney_u(&a, &b).map_err(|e| e.to_string())?;
                let (u, exact) = common::exact_mwu_p(&a, &b);
                ensure((u - r.u_a).abs() < 1e-9, || format!("U {} vs oracle {u}", r.u_a))?;
                let lib_exact = r.p_exact.ok_or("exact p missing for a small sample")?;
                ensure((lib_exact - exact).abs() < 1e-12, || {
                    format!("exact p {lib_exact} vs oracle {exact} for {a:?} / {b:?}")
                })?;
                let gap = (r.p - exact).abs();
                if gap > worst.0 {
                    worst = (gap, (na, nb));
                }
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------

fn ptr_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for set in 0..100 {
        let n = rng.gen_range(1..10);
        let mut records: Vec<PerfTimeRecord> = (0..n)
            .map(|i| PerfTimeRecord {
                model: format!("m{i}"),
                performance: rng.gen_range(0.01..1.0),
                fine_tune_time: rng.gen_range(1.0..10_000.0),
            })
            .collect();
        // one record holds both maxima
        let champion = rng.gen_range(0..n);
        records[champion].performance = 2.0;
        records[champion].fine_tune_time = 20_000.0;
        let base = metrics::ptr(&records).map_err(|e| e.to_string())?;
        let champ_ptr = base[&records[champion].model];
        ensure((champ_ptr - 1.0).abs() <= 1e-9, || format!("set {set}: max/max record has PTR {champ_ptr}"))?;
        for scale_time in [true, false] {
            let c = 10f64.powf(rng.gen_range(-3.0..3.0));
            let scaled: Vec<PerfTimeRecord> = records
                .iter()
                .map(|r| PerfTimeRecord {
                    fine_tune_time: if scale_time { r.fine_tune_time * c } else { r.fine_tune_time },
                    performance: if scale_time { r.performance } else { r.performance * c },
                    ..r.clone()
                })
                .collect();
            let other = metrics::ptr(&scaled).map_err(|e| e.to_string())?;
            for (k, v) in &base {
                ensure((v - other[k]).abs() <= 1e-9, || {
                    format!("set {set}: {k} changed from {v} to {} under scale {c}", other[k])
                })?;
            }
        }
    }
    Ok("100 record sets invariant under time and performance scaling".into())
}

// ---------------------------------------------------------------------------

fn improvement_column() -> Check {
    let mut t = Table::new(["model", "mrr", "baseline"]);
    t.push_row(vec!["target+selected".into(), 0.57.into(), 0.4219.into()]);
    t.add_improvement("mrr", "baseline", "improvement").map_err(|e| e.to_string())?;
    let Cell::Number(x) = t.rows[0][3] else {
        return Err("improvement cell is not a number".into());
    };
    ensure((x - 35.1).abs() <= 0.1, || format!("improvement {x}"))?;
    let text = emit_report(&t, ReportFormat::Text).map_err(|e| e.to_string())?;
    ensure(text.contains("+35.1%"), || format!("rendered table lacks +35.1%:\n{text}"))?;
    Ok(format!("improvement {x:.3}% rendered as +35.1%"))
}

// ---------------------------------------------------------------------------

fn oracle_percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn binning_partition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..1000 {
        let n = rng.gen_range(1..200);
        let degenerate = case % 10 == 0;
        let spread = rng.gen_range(1..400);
        let fixed = rng.gen_range(1..100) as f64;
        let items: Vec<(String, f64)> = (0..n)
            .map(|i| {
                let len = if degenerate { fixed } else { rng.gen_range(1..=spread) as f64 };
                (format!("d{i}"), len)
            })
            .collect();
        let mut sorted: Vec<f64> = items.iter().map(|x| x.1).collect();
        sorted.sort_by(f64::total_cmp);
        let bins = analyze::bin_by_lengths(&items, &sorted).map_err(|e| e.to_string())?;
        let (q1, q2, q3) = bins.boundaries;
        let want = (
            oracle_percentile(&sorted, 0.25),
            oracle_percentile(&sorted, 0.5),
            oracle_percentile(&sorted, 0.75),
        );
        ensure(
            (q1 - want.0).abs() < 1e-9 && (q2 - want.1).abs() < 1e-9 && (q3 - want.2).abs() < 1e-9,
            || format!("case {case}: boundaries {:?} vs {want:?}", bins.boundaries),
        )?;
        let len_of: BTreeMap<&str, f64> = items.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let mut seen = BTreeSet::new();
        for (b, ids) in bins.bins.iter().enumerate() {
            for id in ids {
                ensure(seen.insert(id.clone()), || format!("case {case}: {id} in two bins"))?;
                let l = len_of[id.as_str()];
                let ok = match b {
                    0 => l < q1,
                    1 => q1 <= l && l < q2,
                    2 => q2 <= l && l < q3,
                    _ => l >= q3,
                };
                ensure(ok, || format!("case {case}: length {l} in bin {} with boundaries {:?}", b + 1, bins.boundaries))?;
            }
        }
        ensure(seen.len() == n, || format!("case {case}: {} of {n} documents binned", seen.len()))?;
        if degenerate {
            ensure(bins.sizes() == [0, 0, 0, n], || format!("case {case}: equal lengths gave {:?}", bins.sizes()))?;
        }
    }
    Ok("1000 multisets partitioned; equal-length inputs all in bin 4".into())
}

// ---------------------------------------------------------------------------

fn toy_config(out: &Path) -> Result<RunConfig, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy/run.json");
    let mut cfg = RunConfig::load(&path).map_err(|e| e.to_string())?;
    cfg.out_dir = out.to_path_buf();
    cfg.jobs = 1;
    cfg.embed.threads = 1;
    Ok(cfg)
}

fn end_to_end() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<(Vec<u8>, langsuit::cli::SuitabilityOutcome), String> {
        let cfg = toy_config(&dir.path().join(name))?;
        let o = cmd_suitability(&cfg).map_err(|e| e.to_string())?;
        let bytes = std::fs::read(&o.json_path).map_err(|e| e.to_string())?;
        Ok((bytes, o))
    };
    let (first, o1) = run("first")?;
    let (second, _) = run("second")?;
    ensure(first == second, || "two fresh runs produced different reports".into())?;
    let (cached, o3) = run("first")?;
    ensure(cached == first, || "cached rerun changed the report".into())?;
    ensure(o3.cache.misses == 0 && o3.cache.hits > 0, || format!("rerun cache stats {:?}", o3.cache))?;

    // Hand oracle: python shares vocabulary and planted clones with ruby,
    // haskell shares no token with either. Haskell's clone count is therefore
    // 0, capping its suitability at 0.5, reached only if its semantic score
    // ties python's.
    let r = &o1.report;
    let py = r.row("python").ok_or("no python row")?;
    let hs = r.row("haskell").ok_or("no haskell row")?;
    ensure(hs.sim_text_raw == Some(0), || format!("haskell clones {:?}", hs.sim_text_raw))?;
    ensure(py.sim_text_raw.unwrap_or(0) > 0, || "python has no clones".into())?;
    let (ps, hsem) = (py.sim_sem_raw.unwrap(), hs.sim_sem_raw.unwrap());
    ensure(ps > hsem, || format!("semantic python {ps} <= haskell {hsem}"))?;
    // recombine from raw scores
    let hs_suit = (hsem / ps).max(0.0) / 2.0;
    ensure((hs.suitability - hs_suit).abs() < 1e-12 && py.suitability == 1.0, || {
        format!("suitability python {}, haskell {} (expected 1, {hs_suit})", py.suitability, hs.suitability)
    })?;
    let selected = r.selected();
    ensure(selected == ["python"], || format!("selected {selected:?}, oracle [python]"))?;
    Ok(format!("selected {selected:?}; reports byte-identical, rerun served from cache"))
}

// ---------------------------------------------------------------------------

fn corpus_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let src = dir.path().join("python_test.jsonl");
    let pieces = ["def", "f", "(", "x", ")", ":", "return", "\"s\\\"q\"", "é", "→", "\t", "\n", "#", "{}", "`"];
    let mut lines = String::new();
    for i in 0..1000 {
        let code: String = (0..rng.gen_range(1..30))
            .map(|_| pieces[rng.gen_range(0..pieces.len())])
            .collect::<Vec<_>>()
            .join(" ");
        let mut rec = serde_json::json!({
            "repo": "org/repo",
            "path": format!("src/m{i}.py"),
            "code": format!("x{i} = {code}"),
            "language": "python",
        });
        if rng.gen_bool(0.5) {
            rec["id"] = format!("fn-{i}").into();
        }
        if rng.gen_bool(0.6) {
            rec["docstring"] = format!("Docstring {i} with \"quotes\" and ünïcode").into();
            rec["docstring_tokens"] = serde_json::json!(["Docstring", i.to_string()]);
        }
        if rng.gen_bool(0.3) {
            rec["code_tokens"] = serde_json::json!(["x", "=", i.to_string()]);
        }
        lines.push_str(&rec.to_string());
        lines.push('\n');
    }
    std::fs::write(&src, lines).map_err(|e| e.to_string())?;
    let opts = LoadOptions::default();
    let first = corpus::load_jsonl(&src, "python", Split::Test, opts).map_err(|e| e.to_string())?;
    ensure(first.len() == 1000, || format!("loaded {} documents", first.len()))?;
    for name in ["out.jsonl", "out.jsonl.gz"] {
        let out = dir.path().join(name);
        corpus::write_jsonl(&first, &out).map_err(|e| e.to_string())?;
        let back = corpus::load_jsonl(&out, "python", Split::Test, opts).map_err(|e| e.to_string())?;
        ensure(back.documents == first.documents, || {
            let i = back.documents.iter().zip(&first.documents).position(|(a, b)| a != b);
            format!("{name}: documents differ (first at {i:?})")
        })?;
    }
    Ok("1000 documents identical after plain and gzip round trips".into())
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
    /// Recorded as unattainable; a failure is reported but tolerated.
    known_unattainable: Option<&'static str>,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "published suitability scores",
            limit: Duration::from_secs(1),
            run: published_scores,
            known_unattainable: None,
        },
        Criterion {
            id: 2,
            name: "clone detector vs naive oracle",
            limit: Duration::from_secs(60),
            run: clone_oracle,
            known_unattainable: None,
        },
        Criterion {
            id: 3,
            name: "closed-form mean pairwise cosine",
            limit: Duration::from_secs(10),
            run: closed_form_cosine,
            known_unattainable: None,
        },
        Criterion {
            id: 4,
            name: "metric fixtures",
            limit: Duration::from_secs(30),
            run: metric_fixtures,
            known_unattainable: Some(
                "a normal approximation cannot follow the discrete exact distribution of U for one- or two-element samples or heavily tied data",
            ),
        },
        Criterion {
            id: 5,
            name: "PTR scale invariance",
            limit: Duration::from_secs(5),
            run: ptr_invariance,
            known_unattainable: None,
        },
        Criterion {
            id: 6,
            name: "improvement column arithmetic",
            limit: Duration::from_secs(1),
            run: improvement_column,
            known_unattainable: None,
        },
        Criterion {
            id: 7,
            name: "quartile binning partition",
            limit: Duration::from_secs(5),
            run: binning_partition,
            known_unattainable: None,
        },
        Criterion {
            id: 8,
            name: "end-to-end determinism on toy fixture",
            limit: Duration::from_secs(120),
            run: end_to_end,
            known_unattainable: None,
        },
        Criterion {
            id: 9,
            name: "corpus JSONL round trip",
            limit: Duration::from_secs(5),
            run: corpus_round_trip,
            known_unattainable: None,
        },
    ];

    let mut unexpected = 0;
    let mut known = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > c.limit => Err(format!("{d}; took {elapsed:.2?}, limit {:?}", c.limit)),
            r => r,
        };
        let (status, detail) = match (&result, c.known_unattainable) {
            (Ok(d), None) => ("PASS", d.clone()),
            (Ok(d), Some(_)) => {
                unexpected += 1;
                ("PASS (unexpected: listed as unattainable)", d.clone())
            }
            (Err(e), Some(why)) => {
                known.push(c.id);
                ("FAIL (known unattainable)", format!("{e} -- {why}"))
            }
            (Err(e), None) => {
                unexpected += 1;
                ("FAIL", e.clone())
            }
        };
        println!(
            "criterion {} [{}] {status} in {:.2}s: {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    let passed = criteria.len() - unexpected - known.len();
    println!(
        "acceptance: {passed} passed, {} failed as known unattainable {known:?}, {unexpected} unexpected",
        known.len()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
