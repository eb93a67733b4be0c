use crate::error::{Error, Result};

/// Multiplication table of a finite group on the elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    products: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

/// Tables up to this order get a full associativity check on construction.
const ASSOCIATIVITY_CHECK_LIMIT: usize = 128;

impl FiniteTable {
    /// Validates `products[i][j] = i·j` as a group table.
    pub fn new(products: Vec<Vec<u32>>) -> Result<Self> {
        let n = products.len();
        if n == 0 {
            return Err(Error::invalid("group table is empty"));
        }
        for (i, row) in products.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "table row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&x| x as usize >= n) {
                return Err(Error::invalid(format!(
                    "table row {i} has out-of-range entry {bad}"
                )));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| products[e][x] as usize == x && products[x][e] as usize == x))
            .ok_or_else(|| Error::invalid("table has no two-sided identity"))?
            as u32;

        let mut inverses = vec![0u32; n];
        for (x, inv) in inverses.iter_mut().enumerate() {
            let y = (0..n)
                .find(|&y| products[x][y] == identity && products[y][x] == identity)
                .ok_or_else(|| Error::invalid(format!("element {x} has no inverse")))?;
            *inv = y as u32;
        }
        for x in 0..n {
            let mut seen = vec![false; n];
            for y in 0..n {
                let p = products[x][y] as usize;
                if seen[p] {
                    return Err(Error::invalid(format!(
                        "table row {x} is not a permutation"
                    )));
                }
                seen[p] = true;
            }
        }
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = products[a][b] as usize;
                    for c in 0..n {
                        let bc = products[b][c] as usize;
                        if products[ab][c] != products[a][bc] {
                            return Err(Error::invalid(format!(
                                "table is not associative at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(FiniteTable {
            products,
            identity,
            inverses,
        })
    }

    /// The cyclic group `Z/n` with `i·j = i + j mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cyclic group of order 0"));
        }
        let products = (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
            .collect();
        Ok(FiniteTable {
            products,
            identity: 0,
            inverses: (0..n).map(|i| ((n - i) % n) as u32).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.products.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.products[a as usize][b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn products(&self) -> &[Vec<u32>] {
        &self.products
    }
}
