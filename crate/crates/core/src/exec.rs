/// Execution strategy for the data-parallel loops.
///
/// `Parallel` silently degrades to `Sequential` when the crate is built
/// without the `parallel` feature. Both strategies produce identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Exec {
    /// Whether this strategy will actually fan out to the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

// Pixel loops are split into chunks of this many samples.
pub(crate) const PIXEL_CHUNK: usize = 1 << 15;
