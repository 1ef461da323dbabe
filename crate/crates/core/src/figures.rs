//! Zero data of `Δ_n^{ψ_d}`: the zero of largest real part per `n` and the
//! positive real zeros `α_1 < α_2 < ...`.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::ArithFn;
use crate::genpoly::build_sequence;
use crate::realroots::complex_roots;
use crate::turan::delta;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub n: u64,
    pub re: f64,
    pub im: f64,
    pub is_real: bool,
    /// `k` for the `k`-th positive real zero, counted from the left.
    pub alpha_index: Option<usize>,
    /// Whether this is the zero of largest real part.
    pub rightmost: bool,
    pub converged: bool,
}

/// Rows for `1 <= n <= n_max`, ordered by `n` then by real part.
pub fn figure_rows(d: u32, n_max: u64) -> Result<Vec<FigureRow>> {
    let seq = build_sequence(&ArithFn::psi(d), n_max + 1)?;
    let per_n: Vec<Vec<FigureRow>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let pic = complex_roots(delta(&seq, n)?.delta())?;
            let right = pic.rightmost().cloned();
            let positive: Vec<f64> = pic.positive_real().iter().map(|r| r.to_f64()).collect();
            let mut rows: Vec<FigureRow> = positive
                .iter()
                .enumerate()
                .map(|(i, &re)| FigureRow {
                    n,
                    re,
                    im: 0.0,
                    is_real: true,
                    alpha_index: Some(i + 1),
                    rightmost: false,
                    converged: true,
                })
                .collect();
            if let Some(r) = right {
                match rows.iter_mut().find(|row| r.is_real && row.re == r.re) {
                    Some(row) => row.rightmost = true,
                    None => rows.push(FigureRow {
                        n,
                        re: r.re,
                        im: r.im,
                        is_real: r.is_real,
                        alpha_index: None,
                        rightmost: true,
                        converged: r.converged && pic.certified,
                    }),
                }
            }
            rows.sort_by(|a, b| a.re.total_cmp(&b.re));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

/// One line per `n`: `n,R|C,<number of positive real zeros>`, where the
/// letter labels the zero of largest real part.
pub fn label_lines(rows: &[FigureRow]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let n = rows[i].n;
        let group: Vec<&FigureRow> = rows[i..].iter().take_while(|r| r.n == n).collect();
        let right = group.iter().find(|r| r.rightmost).map_or('?', |r| if r.is_real { 'R' } else { 'C' });
        let count = group.iter().filter(|r| r.alpha_index.is_some()).count();
        out.push(format!("{n},{right},{count}"));
        i += group.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rows_for_d2() {
        let rows = figure_rows(2, 6).unwrap();
        // Δ_1 = (x/2)(x - 4).
        let first = &rows[0];
        assert_eq!(first.n, 1);
        assert!(first.is_real && first.rightmost);
        assert!((first.re - 4.0).abs() < 1e-12);
        assert_eq!(first.alpha_index, Some(1));
        assert_eq!(label_lines(&rows).len(), 6);
    }

    #[test]
    fn two_positive_zeros_for_d5() {
        let rows = figure_rows(5, 8).unwrap();
        for n in 3..=8u64 {
            let alphas: Vec<&FigureRow> = rows.iter().filter(|r| r.n == n && r.alpha_index.is_some()).collect();
            assert_eq!(alphas.len(), 2, "n = {n}");
            assert!(alphas[0].re < alphas[1].re);
        }
        let n4: Vec<f64> = rows.iter().filter(|r| r.n == 4 && r.alpha_index.is_some()).map(|r| r.re).collect();
        assert!(n4[0] < 1.0 && 1.0 < n4[1]);
    }
}
