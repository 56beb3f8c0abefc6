//! Young's orthogonal form for irreducible representations of `S_n`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Partitions of `n` in reverse lexicographic order, `[n]` first.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A standard tableau as the (row, column) cell of each entry `0..n`.
pub type Tableau = Vec<(usize, usize)>;

pub fn standard_tableaux(shape: &[usize]) -> Vec<Tableau> {
    fn rec(shape: &[usize], lens: &mut Vec<usize>, cells: &mut Tableau, n: usize, out: &mut Vec<Tableau>) {
        if cells.len() == n {
            out.push(cells.clone());
            return;
        }
        for row in 0..shape.len() {
            let fits = lens[row] < shape[row] && (row == 0 || lens[row - 1] > lens[row]);
            if fits {
                cells.push((row, lens[row]));
                lens[row] += 1;
                rec(shape, lens, cells, n, out);
                lens[row] -= 1;
                cells.pop();
            }
        }
    }
    let n = shape.iter().sum();
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), n, &mut out);
    out
}

/// Matrix of the adjacent transposition swapping entries `i` and `i + 1`.
///
/// With axial distance `a = c(i+1) - c(i)` (content `c = column - row`), the
/// tableau `T` maps to `T/a + sqrt(1 - 1/a²) T'`, where `T'` swaps the two
/// entries.
pub fn adjacent_transposition(tableaux: &[Tableau], i: usize) -> DMatrix<Complex64> {
    let index: HashMap<&Tableau, usize> = tableaux.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let dim = tableaux.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let content = |(r, c): (usize, usize)| c as f64 - r as f64;
    for (t, tab) in tableaux.iter().enumerate() {
        let a = content(tab[i + 1]) - content(tab[i]);
        m[(t, t)] = Complex64::new(1.0 / a, 0.0);
        if a.abs() != 1.0 {
            let mut swapped = tab.clone();
            swapped.swap(i, i + 1);
            let s = index[&swapped];
            m[(s, t)] = Complex64::new((1.0 - 1.0 / (a * a)).sqrt(), 0.0);
        }
    }
    m
}
