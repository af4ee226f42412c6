use alloc::string::String;
use alloc::vec::Vec;

/// Receives a human-readable line for each deciding comparison.
pub trait Trace {
    fn note(&mut self, step: impl FnOnce() -> String);
}

/// Discards every step.
impl Trace for () {
    #[inline]
    fn note(&mut self, _step: impl FnOnce() -> String) {}
}

impl Trace for Vec<String> {
    fn note(&mut self, step: impl FnOnce() -> String) {
        self.push(step());
    }
}
