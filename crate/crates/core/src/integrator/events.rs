/// Which sign changes of a guard count as an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// negative to non-negative
    Rising,
    /// positive to non-positive
    Falling,
    Any,
}

impl Direction {
    pub(crate) fn crosses(self, left: f64, right: f64) -> bool {
        let rising = left < 0.0 && right >= 0.0;
        let falling = left > 0.0 && right <= 0.0;
        match self {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Any => rising || falling,
        }
    }
}

type Guard<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>;

/// A scalar guard `g(s, y)` watched along accepted steps.
///
/// A guard that is exactly zero at the left end of a step never triggers, so
/// a trajectory started on the zero set (a shot launched from the axis, say)
/// does not fire immediately. Crossings before `active_after` are ignored.
pub struct EventSpec<'a, const N: usize> {
    pub id: &'static str,
    guard: Guard<'a, N>,
    pub direction: Direction,
    pub terminal: bool,
    pub active_after: f64,
}

impl<'a, const N: usize> EventSpec<'a, N> {
    pub fn new(id: &'static str, guard: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        Self {
            id,
            guard: Box::new(guard),
            direction: Direction::Any,
            terminal: false,
            active_after: f64::NEG_INFINITY,
        }
    }

    pub fn rising(mut self) -> Self {
        self.direction = Direction::Rising;
        self
    }

    pub fn falling(mut self) -> Self {
        self.direction = Direction::Falling;
        self
    }

    pub fn terminal(mut self) -> Self {
        self.terminal = true;
        self
    }

    pub fn active_after(mut self, s: f64) -> Self {
        self.active_after = s;
        self
    }

    pub fn eval(&self, s: f64, y: &[f64; N]) -> f64 {
        (self.guard)(s, y)
    }
}

impl<const N: usize> std::fmt::Debug for EventSpec<'_, N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EventSpec")
            .field("id", &self.id)
            .field("direction", &self.direction)
            .field("terminal", &self.terminal)
            .field("active_after", &self.active_after)
            .finish()
    }
}

/// A located crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord<const N: usize> {
    pub id: &'static str,
    pub s: f64,
    pub state: [f64; N],
}

/// Brent's method on a bracket `[a, b]` with `f(a)`, `f(b)` of opposite sign
/// (or `f(b) == 0`). Returns a point within `tol` of a root.
pub(crate) fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> f64 {
    if fb == 0.0 {
        return b;
    }
    if fa == 0.0 {
        return a;
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // secant or inverse quadratic step
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
    }
    b
}
