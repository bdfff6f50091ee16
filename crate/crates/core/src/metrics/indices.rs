//! Hirsch-type bibliometric indices over plain citation counts.
//!
//! Counts are taken as given; none of these functions care about the order
//! of their input except where a tie rule is documented.

use crate::scalar::Scalar;

/// Largest `h` such that at least `h` entries are `>= h`.
pub fn h_index(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|&(i, &c)| c > i).count()
}

/// Largest integer `h` such that at least `h` scores are `>= h`.
pub fn h_index_of_scores<T: Scalar>(scores: &[T]) -> usize {
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &s)| s >= T::of_usize(i + 1))
        .count()
}

/// Largest `g` such that the `g` most cited papers hold at least `g²`
/// citations, counting missing papers as uncited.
pub fn g_index(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    // prefix(k) - k² is concave in k, so the feasible k form a prefix
    let mut cumulative = 0usize;
    let mut g = 0usize;
    loop {
        let k = g + 1;
        cumulative += sorted.get(g).copied().unwrap_or(0);
        if cumulative < k * k {
            return g;
        }
        g = k;
    }
}

/// Total citations divided by `h²`; zero when `h = 0`.
pub fn a_index<T: Scalar>(counts: &[usize]) -> T {
    let h = h_index(counts);
    if h == 0 {
        return T::zero();
    }
    let total: usize = counts.iter().sum();
    T::of_usize(total) / T::of_usize(h * h)
}

/// Square root of the h-core's citations in excess of `h²`.
pub fn e_index<T: Scalar>(counts: &[usize]) -> T {
    let h = h_index(counts);
    if h == 0 {
        return T::zero();
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let core: usize = sorted[..h].iter().sum();
    T::of_usize(core - h * h).sqrt()
}

/// Papers as `(citations, number_of_authors)` in publication-id order. The
/// h-core is the `h` most cited papers, ties going to the earlier id.
pub fn individual_h_index<T: Scalar>(papers: &[(usize, usize)]) -> T {
    let counts: Vec<usize> = papers.iter().map(|p| p.0).collect();
    let h = h_index(&counts);
    if h == 0 {
        return T::zero();
    }
    let mut order: Vec<usize> = (0..papers.len()).collect();
    order.sort_by(|&a, &b| papers[b].0.cmp(&papers[a].0));
    let authors: usize = order[..h].iter().map(|&i| papers[i].1).sum();
    let mean = T::of_usize(authors) / T::of_usize(h);
    T::of_usize(h) / mean
}

/// Age weighting parameters for the contemporary and trend indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexParams {
    pub gamma: f64,
    pub delta: f64,
    pub current_year: i32,
}

impl IndexParams {
    pub fn new(current_year: i32) -> Self {
        IndexParams {
            gamma: 4.0,
            delta: 1.0,
            current_year,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.gamma > 0.0) || !(self.delta >= 0.0) {
            return Err(crate::Error::InvalidArgument(format!(
                "index parameters need gamma > 0 and delta >= 0, got gamma={} delta={}",
                self.gamma, self.delta
            )));
        }
        Ok(())
    }

    /// `(now - year + 1)^(-delta)`; years in the future count as age 1.
    pub fn age_weight<T: Scalar>(&self, year: i32) -> T {
        let age = (self.current_year - year + 1).max(1);
        T::of(age as f64).powf(-T::of(self.delta))
    }
}

/// S^c for each `(year, citations)` paper.
pub fn contemporary_scores<T: Scalar>(papers: &[(i32, usize)], params: &IndexParams) -> Vec<T> {
    let gamma = T::of(params.gamma);
    papers
        .iter()
        .map(|&(year, cites)| gamma * params.age_weight::<T>(year) * T::of_usize(cites))
        .collect()
}

pub fn contemporary_h_index<T: Scalar>(papers: &[(i32, usize)], params: &IndexParams) -> usize {
    h_index_of_scores(&contemporary_scores::<T>(papers, params))
}

/// S^t for each paper, given the years of the papers citing it.
pub fn trend_scores<T: Scalar>(citing_years: &[Vec<i32>], params: &IndexParams) -> Vec<T> {
    let gamma = T::of(params.gamma);
    citing_years
        .iter()
        .map(|years| {
            gamma
                * years
                    .iter()
                    .map(|&y| params.age_weight::<T>(y))
                    .fold(T::zero(), |a, b| a + b)
        })
        .collect()
}

pub fn trend_h_index<T: Scalar>(citing_years: &[Vec<i32>], params: &IndexParams) -> usize {
    h_index_of_scores(&trend_scores::<T>(citing_years, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: [usize; 5] = [10, 8, 5, 4, 3];

    #[test]
    fn h_examples() {
        assert_eq!(h_index(&SAMPLE), 4);
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[1, 1, 1]), 1);
        assert_eq!(h_index(&[0, 0]), 0);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_index(&SAMPLE), 5);
        assert_eq!(g_index(&[0, 0]), 0);
        assert_eq!(g_index(&[4, 4, 4, 4]), 4);
        // padding with virtual uncited papers: 9 citations, one paper
        assert_eq!(g_index(&[9]), 3);
        assert_eq!(g_index(&[]), 0);
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_index::<f64>(&SAMPLE), 1.875);
        assert_eq!(a_index::<f64>(&[]), 0.0);
        assert_eq!(a_index::<f64>(&[1]), 1.0);
    }

    #[test]
    fn e_examples() {
        assert!((e_index::<f64>(&SAMPLE) - 11f64.sqrt()).abs() < 1e-12);
        assert_eq!(e_index::<f64>(&[3, 3, 3]), 0.0);
        assert_eq!(e_index::<f64>(&[5]), 2.0);
        assert_eq!(e_index::<f64>(&[]), 0.0);
    }

    #[test]
    fn individual_examples() {
        let v: f64 = individual_h_index(&[(5, 2), (3, 4), (0, 1)]);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let solo: f64 = individual_h_index(&[(5, 1), (3, 1), (2, 1)]);
        assert_eq!(solo, 2.0);
        assert_eq!(individual_h_index::<f64>(&[(0, 3)]), 0.0);
        // tie at the core boundary goes to the earlier paper
        let tie: f64 = individual_h_index(&[(1, 1), (1, 5)]);
        assert_eq!(tie, 1.0);
    }

    #[test]
    fn contemporary_examples() {
        let p = IndexParams::new(2010);
        let s = contemporary_scores::<f64>(&[(2010, 10)], &p);
        assert_eq!(s, [40.0]);
        assert_eq!(contemporary_h_index::<f64>(&[(2010, 10)], &p), 1);
        assert_eq!(contemporary_h_index::<f64>(&[(2000, 0), (2005, 0)], &p), 0);
        // age 4 weighs 4/5 under the formula
        let aged = contemporary_scores::<f64>(&[(2007, 5)], &p);
        assert!((aged[0] - 4.0 * 5.0 / 4.0).abs() < 1e-12);
        // future years count as age 1
        assert_eq!(contemporary_scores::<f64>(&[(2015, 1)], &p), [4.0]);
    }

    #[test]
    fn trend_examples() {
        let p = IndexParams::new(2010);
        let s = trend_scores::<f64>(&[vec![2010, 2009]], &p);
        assert_eq!(s, [6.0]);
        assert_eq!(trend_h_index::<f64>(&[vec![], vec![]], &p), 0);
    }

    #[test]
    fn params_validation() {
        assert!(IndexParams::new(2000).validate().is_ok());
        assert!(IndexParams { gamma: 0.0, ..IndexParams::new(2000) }.validate().is_err());
        assert!(IndexParams { delta: -1.0, ..IndexParams::new(2000) }.validate().is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_g_dominates_h(mut counts in prop::collection::vec(0usize..30, 0..15)) {
            let h = h_index(&counts);
            let g = g_index(&counts);
            prop_assert!(g >= h);
            counts.reverse();
            prop_assert_eq!(h_index(&counts), h);
            prop_assert_eq!(g_index(&counts), g);
        }

        #[test]
        fn adding_a_citation_is_monotone(counts in prop::collection::vec(0usize..20, 1..12), pick in 0usize..12) {
            let mut more = counts.clone();
            let i = pick % more.len();
            more[i] += 1;
            prop_assert!(h_index(&more) >= h_index(&counts));
            prop_assert!(g_index(&more) >= g_index(&counts));
            let ah2 = |c: &[usize]| { let h = h_index(c) as f64; a_index::<f64>(c) * h * h };
            prop_assert!(ah2(&more) >= ah2(&counts) - 1e-9);
            let eh = |c: &[usize]| { let h = h_index(c) as f64; let e = e_index::<f64>(c); e * e + h * h };
            prop_assert!(eh(&more) >= eh(&counts) - 1e-9);
        }

        #[test]
        fn scores_of_integers_match_h(counts in prop::collection::vec(0usize..30, 0..15)) {
            let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            prop_assert_eq!(h_index_of_scores(&as_f), h_index(&counts));
        }
    }
}
