//! C ABI over `morava_koszul`.
//!
//! A job is an opaque handle holding `(p, m, N, K)`. Calls return an
//! [`MkStatus`]; on failure [`mk_last_error`] describes the problem. Strings
//! handed out must be released with [`mk_string_free`], handles with
//! [`mk_job_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use morava_koszul::report::{self, Command, JobSpec, EXIT_OK, EXIT_VERIFY_FAILED};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerifyFailed = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkCommand {
    WCoeffs = 0,
    DCoeffs = 1,
    Presentation = 2,
    Cohomology = 3,
    Verify = 4,
    Height1 = 5,
}

impl From<MkCommand> for Command {
    fn from(c: MkCommand) -> Self {
        match c {
            MkCommand::WCoeffs => Command::WCoeffs,
            MkCommand::DCoeffs => Command::DCoeffs,
            MkCommand::Presentation => Command::Presentation,
            MkCommand::Cohomology => Command::Cohomology,
            MkCommand::Verify => Command::Verify,
            MkCommand::Height1 => Command::Height1,
        }
    }
}

/// Opaque job handle.
pub struct MkJob {
    spec: JobSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> MkStatus) -> MkStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        MkStatus::Panic
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn mk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a job. Zero for `p_prec` or `a_prec` selects the default for `m`.
/// The configuration is validated here.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn mk_job_new(p: u64, m: u32, p_prec: u32, a_prec: usize, out: *mut *mut MkJob) -> MkStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is NULL");
            return MkStatus::NullPointer;
        }
        let mut spec = JobSpec::new(Command::Verify).prime(p).level(m);
        spec.p_prec = (p_prec != 0).then_some(p_prec);
        spec.a_prec = (a_prec != 0).then_some(a_prec);
        if let Err(e) = spec.job() {
            set_error(e.to_string());
            return MkStatus::InvalidArgument;
        }
        *out = Box::into_raw(Box::new(MkJob { spec }));
        MkStatus::Ok
    })
}

/// Releases a job. NULL is ignored.
///
/// # Safety
/// `job` must come from [`mk_job_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mk_job_free(job: *mut MkJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}

/// Runs `command` on the job and stores its JSON document in `out_json`.
/// The document is produced even when a verification fails, in which case
/// the status is `MK_STATUS_VERIFY_FAILED`.
///
/// # Safety
/// `job` must be a live handle and `out_json` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mk_job_run(
    job: *const MkJob,
    command: MkCommand,
    pretty: bool,
    out_json: *mut *mut c_char,
) -> MkStatus {
    guard(|| {
        if job.is_null() || out_json.is_null() {
            set_error("NULL argument");
            return MkStatus::NullPointer;
        }
        let mut spec = (*job).spec.clone();
        spec.command = command.into();
        spec.pretty = pretty;
        let outcome = report::run(&spec);
        let status = match outcome.exit_code {
            EXIT_OK => MkStatus::Ok,
            EXIT_VERIFY_FAILED => {
                set_error("verification failed");
                MkStatus::VerifyFailed
            }
            _ => {
                set_error(outcome.document.clone());
                MkStatus::InvalidArgument
            }
        };
        *out_json = CString::new(outcome.document).expect("JSON has no NUL").into_raw();
        status
    })
}

/// Runs the verification suite; `out_pass` receives the verdict.
///
/// # Safety
/// `job` must be a live handle and `out_pass` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mk_job_verify(job: *const MkJob, out_pass: *mut bool) -> MkStatus {
    guard(|| {
        if job.is_null() || out_pass.is_null() {
            set_error("NULL argument");
            return MkStatus::NullPointer;
        }
        let kjob = match (*job).spec.job() {
            Ok(j) => j,
            Err(e) => {
                set_error(e.to_string());
                return MkStatus::InvalidArgument;
            }
        };
        match report::verify(&kjob, None) {
            Ok(r) => {
                *out_pass = r.pass;
                if r.pass {
                    MkStatus::Ok
                } else {
                    set_error(format!("failed: {}", r.failed.join(", ")));
                    MkStatus::VerifyFailed
                }
            }
            Err(e) => {
                set_error(e.to_string());
                MkStatus::InvalidArgument
            }
        }
    })
}

/// Runs a job-independent command (`w-coeffs`, `d-coeffs`, `height1`).
/// `m` is the largest tau for `d-coeffs`; negative values mean unset.
///
/// # Safety
/// `out_json` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mk_run_prime(command: MkCommand, p: u64, m: i64, out_json: *mut *mut c_char) -> MkStatus {
    guard(|| {
        if out_json.is_null() {
            set_error("out_json is NULL");
            return MkStatus::NullPointer;
        }
        let mut spec = JobSpec::new(command.into()).prime(p);
        if m >= 0 {
            match u32::try_from(m) {
                Ok(m) => spec.m = Some(m),
                Err(_) => {
                    set_error("m out of range");
                    return MkStatus::InvalidArgument;
                }
            }
        }
        let outcome = report::run(&spec);
        let status = if outcome.exit_code == EXIT_OK {
            MkStatus::Ok
        } else {
            set_error(outcome.document.clone());
            MkStatus::InvalidArgument
        };
        *out_json = CString::new(outcome.document).expect("JSON has no NUL").into_raw();
        status
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
