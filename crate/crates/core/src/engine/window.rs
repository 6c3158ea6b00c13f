use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::time::Time;

/// Start window `s = [s_lo, s_hi]` and end window `e = [e_lo, e_hi]` of a
/// mode extent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub s_lo: Time,
    pub s_hi: Time,
    pub e_lo: Time,
    pub e_hi: Time,
}

impl Window {
    pub fn new(s: (Time, Time), e: (Time, Time)) -> Self {
        Window { s_lo: s.0, s_hi: s.1, e_lo: e.0, e_hi: e.1 }
    }

    pub fn is_valid(&self) -> bool {
        self.s_lo <= self.s_hi && self.e_lo <= self.e_hi
    }

    /// Shortest possible duration, `e⁻ − s⁺`.
    pub fn min_duration(&self) -> Option<Time> {
        self.e_lo.minus(self.s_hi)
    }

    /// Longest possible duration, `e⁺ − s⁻`.
    pub fn max_duration(&self) -> Option<Time> {
        self.e_hi.minus(self.s_lo)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s=[{}, {}] e=[{}, {}]", self.s_lo, self.s_hi, self.e_lo, self.e_hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaticOutcome {
    Inconsistent,
    /// Tightened window and the bounds that had to be kept.
    Tightened { window: Window, recorded: Vec<Rational64> },
}

/// Evaluates duration bounds `t < d` against a window.
///
/// A bound that the window already forces is dropped, one the window
/// violates makes the extent inconsistent, and any other one tightens both
/// windows until nothing changes.
pub fn static_eval(window: Window, bounds: &[Rational64]) -> StaticOutcome {
    let mut w = window;
    let mut recorded = Vec::new();
    for &d in bounds {
        let d_time = Time::At(d);
        // Open windows: a shortest duration equal to d is not attainable.
        if w.min_duration().is_some_and(|m| m >= d_time) {
            return StaticOutcome::Inconsistent;
        }
        if w.max_duration().is_some_and(|m| m < d_time) {
            continue;
        }
        if !recorded.contains(&d) {
            recorded.push(d);
        }
    }
    loop {
        let before = w;
        for &d in &recorded {
            w.e_hi = w.e_hi.min(w.s_hi.shift(d));
            w.s_lo = w.s_lo.max(w.e_lo.shift(-d));
        }
        if w == before {
            break;
        }
    }
    if !w.is_valid() {
        return StaticOutcome::Inconsistent;
    }
    StaticOutcome::Tightened { window: w, recorded }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    #[test]
    fn tightens_start() {
        let w = Window::new((Time::NegInf, Time::int(2)), (Time::int(2), Time::int(3)));
        let StaticOutcome::Tightened { window, recorded } = static_eval(w, &[r(3)]) else {
            panic!("expected tightening");
        };
        assert_eq!(window, Window::new((Time::int(-1), Time::int(2)), (Time::int(2), Time::int(3))));
        assert_eq!(recorded, vec![r(3)]);
    }

    #[test]
    fn tightens_both_sides() {
        let w = Window::new((Time::NegInf, Time::int(2)), (Time::int(2), Time::int(6)));
        let StaticOutcome::Tightened { window, .. } = static_eval(w, &[r(3)]) else {
            panic!("expected tightening");
        };
        assert_eq!(window, Window::new((Time::int(-1), Time::int(2)), (Time::int(2), Time::int(5))));
    }

    #[test]
    fn too_long() {
        let w = Window::new((Time::int(0), Time::int(1)), (Time::int(5), Time::int(6)));
        assert_eq!(static_eval(w, &[r(3)]), StaticOutcome::Inconsistent);
    }

    #[test]
    fn already_short() {
        let w = Window::new((Time::int(0), Time::int(1)), (Time::int(1), Time::int(2)));
        assert_eq!(static_eval(w, &[r(3)]), StaticOutcome::Tightened { window: w, recorded: vec![] });
    }
}
