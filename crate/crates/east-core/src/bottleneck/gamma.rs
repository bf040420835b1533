//! Enumeration of the site families an interval-growing run can trace, and
//! the count of admissible distance strings. Together they convert the
//! boundary's escape rate into a pure counting bound.

use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap};

/// All families of `n + 1` distinct sites in `[0, L]` reachable by an
/// admissible run from the witness `z0`: the first site is `z0 - 1`, each
/// later step extends the current interval left or right by a distance of at
/// most the sum of the earlier distances. Families are deduplicated by their
/// point set and returned sorted.
pub fn enumerate_gamma(z0: usize, n: usize, l: usize) -> Result<Vec<Vec<usize>>> {
    if z0 < 1 || z0 > l {
        return Err(Error::SiteOutOfRange { site: z0, len: l });
    }
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut points = vec![z0 - 1];
    dfs(z0 - 1, z0, 1, 1, n, l, &mut points, &mut out);
    Ok(out.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    a: usize,
    b: usize,
    sum: usize,
    k: usize,
    n: usize,
    l: usize,
    points: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
) {
    if k == n + 1 {
        let mut family = points.clone();
        family.sort_unstable();
        out.insert(family);
        return;
    }
    for d in 1..=sum {
        if a >= d {
            points.push(a - d);
            dfs(a - d, b, sum + d, k + 1, n, l, points, out);
            points.pop();
        }
        if b + d <= l {
            points.push(b + d);
            dfs(a, b + d, sum + d, k + 1, n, l, points, out);
            points.pop();
        }
    }
}

/// Number of positive integer strings `d_2..d_{n+1}` with `d_1 = 1` and each
/// entry at most the sum of all earlier ones.
pub fn count_d_strings(n: usize) -> u128 {
    fn rec(sum: u64, remaining: usize, memo: &mut HashMap<(u64, usize), u128>) -> u128 {
        if remaining == 0 {
            return 1;
        }
        if let Some(&v) = memo.get(&(sum, remaining)) {
            return v;
        }
        let v = (1..=sum).map(|d| rec(sum + d, remaining - 1, memo)).sum();
        memo.insert((sum, remaining), v);
        v
    }
    rec(1, n, &mut HashMap::new())
}
