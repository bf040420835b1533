//! Dirichlet form and variance under the reversible measure, with two
//! independently coded evaluation routes kept as cross-checks of the rate
//! structure.

use super::generator::Generator;
use super::set::StateSet;

/// `D(f) = (1/2) sum over ordered transitions of pi(from) rate (df)^2`.
pub fn dirichlet_form(gen: &Generator, f: &[f64]) -> f64 {
    assert_eq!(f.len(), gen.n());
    let pi = gen.pi();
    let mut acc = 0.0;
    gen.for_each_edge(|from, to, rate| {
        let d = f[to] - f[from];
        acc += pi[from] * rate * d * d;
    });
    0.5 * acc
}

/// Same form through conditional variances: for each configuration and each
/// site whose left neighbour is vacant, the single-site heat-bath variance
/// `p q (f(eta with 0 at x) - f(eta with 1 at x))^2`.
pub fn dirichlet_form_local(gen: &Generator, f: &[f64]) -> f64 {
    assert_eq!(f.len(), gen.n());
    let pq = gen.params().p() * gen.params().q();
    let pi = gen.pi();
    let mut acc = 0.0;
    for id in 0..gen.n() {
        let mut legal = gen.legal_sites(id);
        let mut local = 0.0;
        while let Some(site) = legal.next_site() {
            let bit = 1usize << (site - 1);
            let d = f[id | bit] - f[id & !bit];
            local += pq * d * d;
        }
        acc += pi[id] * local;
    }
    acc
}

/// `Var_pi(f)`.
pub fn variance(gen: &Generator, f: &[f64]) -> f64 {
    assert_eq!(f.len(), gen.n());
    let pi = gen.pi();
    let mean: f64 = (0..gen.n()).map(|i| pi[i] * f[i]).sum();
    (0..gen.n()).map(|i| pi[i] * (f[i] - mean).powi(2)).sum()
}

/// `D(1_A)`: only transitions crossing the boundary of `A` contribute, each
/// with squared increment one.
pub fn indicator_dirichlet(gen: &Generator, set: &StateSet) -> f64 {
    assert_eq!(set.space(), gen.n());
    let pi = gen.pi();
    let mut acc = 0.0;
    gen.for_each_edge(|from, to, rate| {
        if set.contains(from) != set.contains(to) {
            acc += pi[from] * rate;
        }
    });
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::spectral::relaxation_time;
    use crate::Params;

    fn pseudo(f: &mut Vec<f64>, n: usize) {
        let mut s = 0x9e3779b97f4a7c15u64;
        for _ in 0..n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f.push((s >> 11) as f64 / (1u64 << 53) as f64);
        }
    }

    #[test]
    fn edge_and_local_routes_agree() {
        for &(l, q) in &[(3usize, 0.3f64), (5, 0.12), (6, 0.45)] {
            let gen = Generator::build(&Params::new(l, q).unwrap()).unwrap();
            let mut f = Vec::new();
            pseudo(&mut f, gen.n());
            let a = dirichlet_form(&gen, &f);
            let b = dirichlet_form_local(&gen, &f);
            assert!((a - b).abs() < 1e-12 * a.max(1.0), "L={l} q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn indicator_matches_generic_form() {
        let gen = Generator::build(&Params::new(4, 0.25).unwrap()).unwrap();
        let set = StateSet::spin_is(4, 4, 1);
        let f: Vec<f64> = (0..gen.n())
            .map(|i| if set.contains(i) { 1.0 } else { 0.0 })
            .collect();
        let a = indicator_dirichlet(&gen, &set);
        let b = dirichlet_form(&gen, &f);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn rayleigh_quotient_bounds_the_gap() {
        // For every f, D(f) >= Var(f) / T_rel, with equality on the slow mode.
        let gen = Generator::build(&Params::new(5, 0.2).unwrap()).unwrap();
        let trel = relaxation_time(gen.params()).unwrap().value;
        let mut f = Vec::new();
        pseudo(&mut f, gen.n());
        let d = dirichlet_form(&gen, &f);
        let v = variance(&gen, &f);
        assert!(d * trel >= v * (1.0 - 1e-12));
    }

    #[test]
    fn constant_functions_have_zero_form_and_variance() {
        let gen = Generator::build(&Params::new(4, 0.3).unwrap()).unwrap();
        let f = vec![2.5; gen.n()];
        assert!(dirichlet_form(&gen, &f).abs() < 1e-15);
        assert!(variance(&gen, &f).abs() < 1e-15);
    }
}
