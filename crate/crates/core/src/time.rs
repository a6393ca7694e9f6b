//! Virtual simulation time.

use core::fmt;
use core::ops::{Add, Sub};

/// A point in virtual simulation time, in seconds.
///
/// The event kernel is the only clock owner and guarantees the value is
/// non-negative and non-decreasing over the run. Trace output renders it
/// with nine decimal digits; everything else keeps full `f64` precision.
#[derive(Copy, Clone, Debug, PartialEq, Default)]
pub struct Time(f64);

impl Time {
    pub const ZERO: Time = Time(0.0);

    /// Builds a time from seconds. Panics on NaN or negative input,
    /// which would break the kernel's ordering guarantees.
    pub fn from_secs(seconds: f64) -> Time {
        assert!(seconds.is_finite() && seconds >= 0.0, "invalid time");
        Time(seconds)
    }

    pub fn secs(self) -> f64 {
        self.0
    }

    /// Rounds to the nine-decimal precision used at the trace boundary.
    ///
    /// A time quantized this way survives a format/parse round trip
    /// exactly for any value a bounded simulation can produce.
    pub fn quantized(self) -> f64 {
        libm::round(self.0 * 1e9) / 1e9
    }
}

impl Add<f64> for Time {
    type Output = Time;
    fn add(self, delta: f64) -> Time {
        Time::from_secs(self.0 + delta)
    }
}

impl Sub<Time> for Time {
    type Output = f64;
    fn sub(self, earlier: Time) -> f64 {
        self.0 - earlier.0
    }
}

impl Eq for Time {}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // Values are always finite, so total_cmp agrees with the usual order.
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}", self.0)
    }
}
