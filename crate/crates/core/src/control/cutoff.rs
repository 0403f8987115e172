use crate::error::{Error, Result};
use crate::grid::Interval;
use crate::scalar::Real;

/// Septic smoothstep `35s⁴ − 84s⁵ + 70s⁶ − 20s⁷` on `[0, 1]` with its first two derivatives.
#[inline]
fn smoothstep<T: Real>(s: T) -> (T, T, T) {
    let s = s.max(T::zero()).min(T::one());
    let r = T::one() - s;
    let s2 = s * s;
    let value = s2 * s2 * (T::lit(35.0) + s * (T::lit(-84.0) + s * (T::lit(70.0) - T::lit(20.0) * s)));
    let d1 = T::lit(140.0) * s2 * s * r * r * r;
    let d2 = T::lit(420.0) * s2 * r * r * (r - s);
    (value, d1, d2)
}

/// Value of χ together with the derivatives the control formula needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValue<T> {
    pub value: T,
    pub dx: T,
    pub dxx: T,
    pub dt: T,
}

/// Spatial cutoff `χ₀`, temporal switch `β` and `χ(t, x) = 1 − β(t)(1 − χ₀(x))`.
///
/// `χ₀` is 1 outside the control support `[a, b]`, 0 on the inner interval
/// `[a′, b′]`, with septic transitions on `[a, a′]` and `[b′, b]`. `β`
/// vanishes for `t ≤ 1/2`, equals 1 for `t ≥ 1` and uses the same profile in
/// between. Both are C³ with exact derivatives, which keeps the 3-point
/// stencils second-order consistent across the band edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSystem<T> {
    support: Interval<T>,
    inner: Interval<T>,
}

impl<T: Real> CutoffSystem<T> {
    pub fn new(support: Interval<T>, inner: Interval<T>) -> Result<Self> {
        let (a, b) = (support.lo(), support.hi());
        let (ai, bi) = (inner.lo(), inner.hi());
        if !(T::zero() < a && a < ai && ai < bi && bi < b && b < T::one()) {
            return Err(Error::precondition(format!(
                "cutoff intervals must satisfy 0 < a < a' < b' < b < 1, got [{a}, {b}] and [{ai}, {bi}]"
            )));
        }
        Ok(Self { support, inner })
    }

    /// Inner interval defaults to the middle half of the support.
    pub fn with_default_inner(support: Interval<T>) -> Result<Self> {
        let quarter = support.length() / T::lit(4.0);
        let inner = Interval::new(support.lo() + quarter, support.hi() - quarter)?;
        Self::new(support, inner)
    }

    #[inline]
    pub fn support(&self) -> Interval<T> {
        self.support
    }

    #[inline]
    pub fn inner(&self) -> Interval<T> {
        self.inner
    }

    /// `(χ₀, χ₀′, χ₀″)` at `x`.
    pub fn chi0(&self, x: T) -> (T, T, T) {
        let (a, b) = (self.support.lo(), self.support.hi());
        let (ai, bi) = (self.inner.lo(), self.inner.hi());
        if x <= a || x >= b {
            (T::one(), T::zero(), T::zero())
        } else if x >= ai && x <= bi {
            (T::zero(), T::zero(), T::zero())
        } else if x < ai {
            let w = ai - a;
            let (s, d1, d2) = smoothstep((x - a) / w);
            (T::one() - s, -d1 / w, -d2 / (w * w))
        } else {
            let w = b - bi;
            let (s, d1, d2) = smoothstep((x - bi) / w);
            (s, d1 / w, d2 / (w * w))
        }
    }

    /// `(β, β′)` at time `t` measured from the start of a cycle.
    pub fn beta(&self, t: T) -> (T, T) {
        let half = T::lit(0.5);
        if t <= half {
            (T::zero(), T::zero())
        } else if t >= T::one() {
            (T::one(), T::zero())
        } else {
            let (s, d1, _) = smoothstep((t - half) / half);
            (s, d1 / half)
        }
    }

    /// `χ(t, x)` and its derivatives `∂ₓχ`, `∂ₓ²χ`, `∂ₜχ`.
    pub fn eval_chi(&self, t: T, x: T) -> ChiValue<T> {
        let (c0, c0x, c0xx) = self.chi0(x);
        let (b, bt) = self.beta(t);
        ChiValue {
            value: T::one() - b * (T::one() - c0),
            dx: b * c0x,
            dxx: b * c0xx,
            dt: -bt * (T::one() - c0),
        }
    }
}
