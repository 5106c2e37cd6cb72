//! A deterministic cap on coefficient size in the exact computations.
//!
//! Gröbner bases over Z_(p)[b] can swell to thousands of digits on small
//! inputs. Inside [`guarded`] a coefficient wider than the cap abandons the
//! whole computation, which then reports [`BudgetExceeded`] instead of
//! running for hours. Outside any guard there is no cap.

use std::cell::Cell;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("coefficient growth exceeded the budget of {0} bits")]
pub struct BudgetExceeded(pub u64);

thread_local! {
    static LIMIT: Cell<u64> = const { Cell::new(u64::MAX) };
}

/// The cap in force on this thread.
pub fn limit() -> u64 {
    LIMIT.with(Cell::get)
}

struct Restore(u64);

impl Drop for Restore {
    fn drop(&mut self) {
        LIMIT.with(|l| l.set(self.0));
    }
}

/// Run `f` with the cap lowered to `bits`. Worker threads spawned inside `f`
/// must pick the cap up through [`inherit`].
pub fn guarded<T>(bits: u64, f: impl FnOnce() -> T) -> Result<T, BudgetExceeded> {
    let out = catch_unwind(AssertUnwindSafe(|| inherit(bits.min(limit()), f)));
    match out {
        Ok(v) => Ok(v),
        Err(payload) => match payload.downcast::<BudgetExceeded>() {
            Ok(b) => Err(*b),
            Err(other) => resume_unwind(other),
        },
    }
}

/// Run `f` under a cap taken from another thread; an overrun unwinds to the
/// enclosing [`guarded`].
pub fn inherit<T>(bits: u64, f: impl FnOnce() -> T) -> T {
    let _restore = Restore(LIMIT.with(|l| l.replace(bits)));
    f()
}

pub(crate) fn check(bits: u64) {
    let cap = limit();
    if bits > cap {
        // resume_unwind skips the panic hook: nothing is printed
        resume_unwind(Box::new(BudgetExceeded(cap)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrun_is_reported_and_cap_restored() {
        assert_eq!(guarded(8, || check(9)), Err(BudgetExceeded(8)));
        assert_eq!(limit(), u64::MAX);
        assert_eq!(guarded(8, || guarded(100, limit)), Ok(Ok(8)));
    }

    #[test]
    fn other_panics_pass_through() {
        let r = catch_unwind(|| guarded(8, || panic!("boom")));
        assert!(r.is_err());
    }
}
