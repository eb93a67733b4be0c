/// Integer lattice in `Z^n` kept in Hermite normal form.
///
/// Rows are in echelon form with strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`. Reducing a
/// vector against these rows yields a canonical representative of its coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn new(dim: usize, generators: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i64>> = generators
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .cloned()
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..dim {
            if r >= rows.len() {
                break;
            }
            loop {
                // Smallest nonzero |entry| in this column goes to row r.
                let best = (r..rows.len())
                    .filter(|&i| rows[i][col] != 0)
                    .min_by_key(|&i| rows[i][col].abs());
                let Some(best) = best else { break };
                rows.swap(r, best);
                let p = rows[r][col];
                let mut done = true;
                for i in (r + 1)..rows.len() {
                    let q = rows[i][col].div_euclid(p);
                    if q != 0 {
                        for c in col..dim {
                            rows[i][c] -= q * rows[r][c];
                        }
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if rows[r][col] == 0 {
                continue;
            }
            if rows[r][col] < 0 {
                for c in col..dim {
                    rows[r][c] = -rows[r][c];
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        for i in 0..rows.len() {
            let col = pivots[i];
            let p = rows[i][col];
            for t in 0..i {
                let q = rows[t][col].div_euclid(p);
                if q != 0 {
                    for c in col..dim {
                        rows[t][c] -= q * rows[i][c];
                    }
                }
            }
        }
        Lattice { dim, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Canonical representative of `v + L`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut out = v.to_vec();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let q = out[col].div_euclid(row[col]);
            if q != 0 {
                for c in col..self.dim {
                    out[c] -= q * row[c];
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_lattice() {
        let l = Lattice::new(2, &[vec![0, 1]]);
        assert_eq!(l.rank(), 1);
        assert!(l.contains(&[0, -7]));
        assert!(!l.contains(&[1, 0]));
        assert_eq!(l.reduce(&[3, -4]), vec![3, 0]);
    }

    #[test]
    fn mixed_generators_reach_hermite_form() {
        // <(2,4), (3,5)> = <(1,1), (0,2)>
        let l = Lattice::new(2, &[vec![2, 4], vec![3, 5]]);
        assert!(l.contains(&[1, 1]));
        assert!(l.contains(&[0, 2]));
        assert!(!l.contains(&[0, 1]));
        assert_eq!(l.reduce(&[5, 9]), l.reduce(&[0, 4]));
        assert_eq!(l.reduce(&[0, 3]), vec![0, 1]);
    }

    #[test]
    fn reduction_is_constant_on_cosets() {
        let l = Lattice::new(3, &[vec![2, 0, 1], vec![0, 3, 0], vec![1, 1, 1]]);
        let v = vec![4, -2, 7];
        for g in [vec![2, 0, 1], vec![0, 3, 0], vec![1, 1, 1]] {
            let w: Vec<i64> = v.iter().zip(&g).map(|(a, b)| a - 3 * b).collect();
            assert_eq!(l.reduce(&v), l.reduce(&w));
        }
    }
}
