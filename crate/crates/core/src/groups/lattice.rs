//! Small integer lattices: kernels, saturation and Hermite normal form.

use num_integer::Integer;

/// Unimodular row reduction of `rows` on the columns `0..cols`.
/// Returns the number of pivot rows; they come first.
fn echelon(rows: &mut [Vec<i128>], cols: usize) -> usize {
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&r| rows[r][c] != 0)
                .min_by_key(|&r| rows[r][c].unsigned_abs());
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut clean = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][c] != 0 {
                    let q = Integer::div_floor(&rows[r][c], &rows[pivot_row][c]);
                    let (head, tail) = rows.split_at_mut(r);
                    for (x, &y) in tail[0].iter_mut().zip(&head[pivot_row]) {
                        *x -= q * y;
                    }
                    if tail[0][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                pivot_row += 1;
                break;
            }
        }
    }
    pivot_row
}

/// Integer basis of `{x in Z^n : r . x = 0 for every row r}`.
pub(crate) fn integer_kernel(rows: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let mut work: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            let mut w: Vec<i128> = rows.iter().map(|r| r[i]).collect();
            w.extend((0..n).map(|j| i128::from(i == j)));
            w
        })
        .collect();
    let rank = echelon(&mut work, rows.len());
    work.into_iter().skip(rank).map(|w| w[rows.len()..].to_vec()).collect()
}

/// Row-style Hermite normal form; zero rows are dropped.
pub(crate) fn hermite_normal_form(rows: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let mut work = rows.to_vec();
    let rank = echelon(&mut work, n);
    work.truncate(rank);
    let mut pivot_cols = Vec::with_capacity(rank);
    for r in 0..rank {
        let c = work[r].iter().position(|&x| x != 0).expect("pivot rows are nonzero");
        if work[r][c] < 0 {
            work[r].iter_mut().for_each(|x| *x = -*x);
        }
        pivot_cols.push(c);
    }
    for r in 0..rank {
        let c = pivot_cols[r];
        for above in 0..r {
            let q = Integer::div_floor(&work[above][c], &work[r][c]);
            if q != 0 {
                let pivot = work[r].clone();
                for (x, y) in work[above].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
    }
    work
}

/// `(span_Q L) intersected with Z^n`, in Hermite normal form.
pub(crate) fn saturate(rows: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let orthogonal = integer_kernel(rows, n);
    hermite_normal_form(&integer_kernel(&orthogonal, n), n)
}

pub(crate) fn rank(rows: &[Vec<i128>], n: usize) -> usize {
    hermite_normal_form(rows, n).len()
}

pub(crate) fn cross(u: &[i128], w: &[i128]) -> [i128; 3] {
    [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]]
}
