//! Wall-clock shim. With `std` this wraps `Instant`; without it, elapsed
//! time is always zero so time limits never fire.

#[derive(Debug, Clone, Copy)]
pub struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    #[cfg(feature = "std")]
    pub fn elapsed_s(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    #[cfg(not(feature = "std"))]
    pub fn elapsed_s(&self) -> f64 {
        0.0
    }
}
