//! Real roots of real cubics.
//!
//! Trigonometric (three real roots) or Cardano (one real root) closed forms,
//! followed by Newton polishing on the undepressed polynomial. When the
//! discriminant is too close to zero for the closed form to be trusted the
//! roots are isolated between the critical points and bisected instead.

/// `a x^3 + b x^2 + c x + d`, coefficients highest power first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub coeffs: [f64; 4],
}

impl Cubic {
    pub fn new(coeffs: [f64; 4]) -> Self {
        Self { coeffs }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.coeffs;
        ((a * x + b) * x + c) * x + d
    }

    #[inline]
    fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let [a, b, c, d] = self.coeffs;
        let f = ((a * x + b) * x + c) * x + d;
        let df = (3.0 * a * x + 2.0 * b) * x + c;
        (f, df)
    }

    /// Largest single term magnitude at `x`; residuals are judged against it.
    pub fn residual_scale(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.coeffs;
        (a * x * x * x)
            .abs()
            .max((b * x * x).abs())
            .max((c * x).abs())
            .max(d.abs())
    }

    /// All real roots in ascending order, repeated according to multiplicity
    /// when the closed form reports them so.
    pub fn real_roots(&self) -> Vec<f64> {
        let [a, b, c, d] = self.coeffs;
        if a == 0.0 {
            return quadratic_roots(b, c, d);
        }
        if d == 0.0 {
            let mut roots = quadratic_roots(a, b, c);
            roots.push(0.0);
            roots.sort_by(f64::total_cmp);
            return roots;
        }

        let (b1, c1, d1) = (b / a, c / a, d / a);
        let shift = b1 / 3.0;
        let p = c1 - b1 * shift;
        let q = d1 + shift * (2.0 * shift * shift - c1);
        let half_q = 0.5 * q;
        let third_p = p / 3.0;
        let disc = half_q * half_q + third_p * third_p * third_p;
        let disc_scale = (half_q * half_q).max((third_p * third_p * third_p).abs());

        let mut roots = if disc_scale > 0.0 && disc.abs() <= 1e-10 * disc_scale {
            return self.bisect_all();
        } else if disc < 0.0 {
            let rho = (-third_p).sqrt();
            let cos_arg = (-half_q / (rho * rho * rho)).clamp(-1.0, 1.0);
            let phi = cos_arg.acos() / 3.0;
            let two_rho = 2.0 * rho;
            let tau = 2.0 * std::f64::consts::FRAC_PI_3;
            vec![
                two_rho * phi.cos() - shift,
                two_rho * (phi - tau).cos() - shift,
                two_rho * (phi + tau).cos() - shift,
            ]
        } else {
            let sq = disc.sqrt();
            let u = (-half_q + sq).cbrt();
            let v = (-half_q - sq).cbrt();
            vec![u + v - shift]
        };

        for r in roots.iter_mut() {
            *r = self.polish(*r);
        }
        roots.sort_by(f64::total_cmp);

        if roots.len() == 3 && (roots[0] == roots[1] || roots[1] == roots[2]) {
            // Polishing collapsed two distinct roots onto one.
            return self.bisect_all();
        }
        roots
    }

    fn polish(&self, mut x: f64) -> f64 {
        let (mut fx, _) = self.eval_with_derivative(x);
        for _ in 0..8 {
            let (_, df) = self.eval_with_derivative(x);
            if df == 0.0 || fx == 0.0 {
                break;
            }
            let next = x - fx / df;
            let f_next = self.eval(next);
            if f_next.abs() >= fx.abs() {
                break;
            }
            x = next;
            fx = f_next;
        }
        x
    }

    /// Isolates roots on the monotone pieces between critical points.
    fn bisect_all(&self) -> Vec<f64> {
        let [a, b, c, _] = self.coeffs;
        let mut breaks = quadratic_roots(3.0 * a, 2.0 * b, c);
        breaks.dedup();
        let span = 1.0 + self.cauchy_bound();
        let mut edges = vec![-span];
        edges.extend(breaks.iter().copied().filter(|x| x.abs() < span));
        edges.push(span);

        let mut roots = Vec::with_capacity(3);
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (flo, fhi) = (self.eval(lo), self.eval(hi));
            if flo == 0.0 {
                if roots.last() != Some(&lo) {
                    roots.push(lo);
                }
                continue;
            }
            if fhi == 0.0 {
                roots.push(hi);
                continue;
            }
            if flo.signum() != fhi.signum() {
                roots.push(self.polish(bisect(|x| self.eval(x), lo, hi, flo)));
            }
        }
        if roots.is_empty() {
            // Double root sitting on a critical point.
            if let Some(&x) = breaks
                .iter()
                .min_by(|x, y| self.eval(**x).abs().total_cmp(&self.eval(**y).abs()))
            {
                roots.push(x);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn cauchy_bound(&self) -> f64 {
        let [a, b, c, d] = self.coeffs;
        1.0 + (b / a).abs().max((c / a).abs()).max((d / a).abs())
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of `a x^2 + b x + c` in ascending order, without cancellation.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if c == 0.0 {
        let mut r = vec![0.0, -b / a];
        r.sort_by(f64::total_cmp);
        return r;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    let mut r = vec![q / a, c / q];
    r.sort_by(f64::total_cmp);
    r
}
