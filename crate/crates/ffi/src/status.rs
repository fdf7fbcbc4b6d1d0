use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use langsuit::Error;

/// Result code of every fallible call. On anything but `LS_STATUS_OK`,
/// `ls_last_error_message` describes the failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    EmptyInput = 6,
    /// A score could not be computed: zero norms, no embeddable documents,
    /// a non-positive maximum, or no clone pairs at all.
    Degenerate = 7,
    ModelFormat = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

pub(crate) fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL when the last
/// call succeeded. Valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

pub(crate) fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::Io { .. } => LsStatus::Io,
        Error::MalformedLine { .. }
        | Error::MissingCode { .. }
        | Error::Json(_)
        | Error::Csv(_) => LsStatus::Parse,
        Error::EmptyInput(_) | Error::EmptyVocabulary => LsStatus::EmptyInput,
        Error::ZeroNorm
        | Error::NoEmbeddableDocuments(_)
        | Error::NonPositiveMaximum(_)
        | Error::NoTextualSignal => LsStatus::Degenerate,
        Error::ModelFormat(_) => LsStatus::ModelFormat,
        _ => LsStatus::InvalidArgument,
    }
}

/// Error raised at the boundary, before reaching the library.
pub(crate) struct Fail(pub LsStatus, pub String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

pub(crate) type FfiResult<T = ()> = Result<T, Fail>;

/// Runs `f`, records any error or panic, and converts to a status.
pub(crate) fn guard(f: impl FnOnce() -> FfiResult) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            LsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LsStatus::Panic
        }
    }
}
