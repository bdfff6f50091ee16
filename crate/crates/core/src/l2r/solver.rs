//! Dual coordinate ascent for linear max-margin problems of the form
//!
//! ```text
//! min_w  1/2 |w|^2 + sum_g cap_g * max(0, max_{c in g} (b_c - w.a_c))
//! ```
//!
//! i.e. one slack per group shared by all constraints of that group. The
//! dual is `max sum_c alpha_c b_c - 1/2 |sum_c alpha_c a_c|^2` subject to
//! `alpha >= 0` and `sum_{c in g} alpha_c <= cap_g`. Pairwise ranking uses
//! one group per pair; the listwise working set uses one group per query.

use crate::scalar::{dot, norm_sq, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Stop once the duality gap is below `tol * max(1, primal)`.
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_epochs: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveInfo<T> {
    pub epochs: usize,
    pub primal: T,
    pub dual: T,
    pub converged: bool,
}

#[derive(Clone, Debug)]
struct Constraint<T> {
    a: Vec<T>,
    b: T,
    group: usize,
    sq_norm: T,
}

#[derive(Clone, Debug)]
pub struct DualProblem<T> {
    dim: usize,
    caps: Vec<T>,
    constraints: Vec<Constraint<T>>,
    by_group: Vec<Vec<usize>>,
    alpha: Vec<T>,
    group_sum: Vec<T>,
    w: Vec<T>,
}

impl<T: Scalar> DualProblem<T> {
    pub fn new(dim: usize, caps: Vec<T>) -> Self {
        let groups = caps.len();
        DualProblem {
            dim,
            caps,
            constraints: Vec::new(),
            by_group: vec![Vec::new(); groups],
            alpha: Vec::new(),
            group_sum: vec![T::zero(); groups],
            w: vec![T::zero(); dim],
        }
    }

    /// Adds `w.a >= b - xi_group` with a zero dual variable, so the current
    /// solution stays feasible.
    pub fn push(&mut self, a: Vec<T>, b: T, group: usize) {
        debug_assert_eq!(a.len(), self.dim);
        let sq_norm = norm_sq(&a);
        self.by_group[group].push(self.constraints.len());
        self.constraints.push(Constraint { a, b, group, sq_norm });
        self.alpha.push(T::zero());
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    fn gradient(&self, c: usize) -> T {
        let con = &self.constraints[c];
        con.b - dot(&self.w, &con.a)
    }

    fn shift(&mut self, c: usize, delta: T) {
        self.alpha[c] = self.alpha[c] + delta;
        let g = self.constraints[c].group;
        self.group_sum[g] = self.group_sum[g] + delta;
        let a = &self.constraints[c].a;
        for (w, &x) in self.w.iter_mut().zip(a) {
            *w = *w + delta * x;
        }
    }

    fn rebuild_w(&mut self) {
        let mut w = vec![T::zero(); self.dim];
        for (con, &al) in self.constraints.iter().zip(&self.alpha) {
            if al != T::zero() {
                for (wi, &x) in w.iter_mut().zip(&con.a) {
                    *wi = *wi + al * x;
                }
            }
        }
        self.w = w;
        let mut sums = vec![T::zero(); self.caps.len()];
        for (con, &al) in self.constraints.iter().zip(&self.alpha) {
            sums[con.group] = sums[con.group] + al;
        }
        self.group_sum = sums;
    }

    /// Slack of each group at `w`, i.e. the hinge of its worst constraint.
    pub fn slacks(&self, w: &[T]) -> Vec<T> {
        let mut xi = vec![T::zero(); self.caps.len()];
        for con in &self.constraints {
            let v = con.b - dot(w, &con.a);
            if v > xi[con.group] {
                xi[con.group] = v;
            }
        }
        xi
    }

    pub fn primal(&self, w: &[T]) -> T {
        let half = T::of(0.5);
        let xi = self.slacks(w);
        half * norm_sq(w) + self.caps.iter().zip(&xi).map(|(&c, &x)| c * x).fold(T::zero(), |a, b| a + b)
    }

    pub fn dual(&self) -> T {
        let lin = self
            .constraints
            .iter()
            .zip(&self.alpha)
            .map(|(c, &al)| al * c.b)
            .fold(T::zero(), |a, b| a + b);
        lin - T::of(0.5) * norm_sq(&self.w)
    }

    fn coordinate_step(&mut self, c: usize) {
        let tiny = T::epsilon();
        let g = self.gradient(c);
        let group = self.constraints[c].group;
        let room = (self.caps[group] - self.group_sum[group]).max(T::zero());
        let q = self.constraints[c].sq_norm;
        let al = self.alpha[c];
        let target = if q > tiny { g / q } else if g > T::zero() { room } else { -al };
        let delta = target.max(-al).min(room);
        if delta != T::zero() {
            self.shift(c, delta);
        }
        // group saturated and c still wants more: move mass from the
        // constraint of the group with the smallest gradient
        if target > delta && self.by_group[group].len() > 1 {
            let g_c = self.gradient(c);
            let mut donor = None;
            let mut worst = g_c;
            for &o in &self.by_group[group] {
                if o != c && self.alpha[o] > T::zero() {
                    let g_o = self.gradient(o);
                    if g_o < worst {
                        worst = g_o;
                        donor = Some(o);
                    }
                }
            }
            if let Some(o) = donor {
                let diff: Vec<T> = self.constraints[c]
                    .a
                    .iter()
                    .zip(&self.constraints[o].a)
                    .map(|(&x, &y)| x - y)
                    .collect();
                let denom = norm_sq(&diff);
                let step = if denom > tiny { (g_c - worst) / denom } else { self.alpha[o] };
                let t = step.min(self.alpha[o]);
                if t > T::zero() {
                    self.shift(c, t);
                    self.shift(o, -t);
                }
            }
        }
    }

    pub fn solve(&mut self, cfg: &SolverConfig) -> SolveInfo<T> {
        let tol = T::of(cfg.tol);
        self.rebuild_w();
        let mut epochs = 0;
        loop {
            let primal = self.primal(&self.w);
            let dual = self.dual();
            let gap = primal - dual;
            if gap <= tol * primal.abs().max(T::one()) {
                return SolveInfo {
                    epochs,
                    primal,
                    dual,
                    converged: true,
                };
            }
            if epochs >= cfg.max_epochs {
                return SolveInfo {
                    epochs,
                    primal,
                    dual,
                    converged: false,
                };
            }
            for c in 0..self.constraints.len() {
                self.coordinate_step(c);
            }
            epochs += 1;
            if epochs % 64 == 0 {
                self.rebuild_w();
            }
        }
    }
}
