use num_traits::{One, Zero};

use super::rat::Rat;

/// Reduces `rows` to row-echelon form in place and returns the pivot columns.
/// The returned sign tracks row swaps.
fn echelon(rows: &mut [Vec<Rat>]) -> (Vec<usize>, bool) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut negated = false;
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            negated = !negated;
        }
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = &rows[i][c] / &rows[r][c];
            for j in c..ncols {
                let delta = &factor * &rows[r][j];
                rows[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (pivots, negated)
}

/// Determinant of a square matrix given by rows.
pub fn determinant(matrix: &[Vec<Rat>]) -> Rat {
    assert!(matrix.iter().all(|r| r.len() == matrix.len()), "determinant of a non-square matrix");
    let mut rows = matrix.to_vec();
    let (pivots, negated) = echelon(&mut rows);
    if pivots.len() < rows.len() {
        return Rat::zero();
    }
    let mut det = Rat::one();
    for (i, row) in rows.iter().enumerate() {
        det *= &row[i];
    }
    if negated {
        -det
    } else {
        det
    }
}

pub fn rank(matrix: &[Vec<Rat>]) -> usize {
    let mut rows = matrix.to_vec();
    echelon(&mut rows).0.len()
}

/// Columns carrying a pivot in the echelon form. Projecting onto these
/// coordinates is injective on the row space.
pub fn pivot_columns(matrix: &[Vec<Rat>]) -> Vec<usize> {
    let mut rows = matrix.to_vec();
    echelon(&mut rows).0
}
