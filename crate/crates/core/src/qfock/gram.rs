use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use super::{annihilate_level, QParams};
use crate::error::{Error, Result};
use crate::ncalg::Word;

/// Largest Gram dimension `N^n` assembled as a dense matrix.
pub const MAX_DENSE_GRAM: usize = 4096;

const MAX_BRUTE_LEN: usize = 8;

/// `⟨h_u, h_v⟩_q = Σ_{π∈S_n} q^{i(π)} Π_j δ(u_j, v_{π(j)})`, by enumeration
/// of the permutations compatible with the letters.
pub fn q_inner_brute(u: &Word, v: &Word, params: QParams) -> Result<f64> {
    if u.len() != v.len() {
        return Ok(0.0);
    }
    if u.len() > MAX_BRUTE_LEN {
        return Err(Error::LengthGuard {
            what: "brute-force inner product",
            len: u.len(),
            limit: MAX_BRUTE_LEN,
        });
    }
    let n = u.len();
    let mut used = vec![false; n];
    let mut image = Vec::with_capacity(n);
    let mut total = 0.0;
    brute_rec(u, v, params.q, &mut used, &mut image, &mut total);
    Ok(total)
}

fn brute_rec(u: &Word, v: &Word, q: f64, used: &mut [bool], image: &mut Vec<usize>, total: &mut f64) {
    let j = image.len();
    if j == u.len() {
        *total += q.powi(super::inversions(image) as i32);
        return;
    }
    for t in 0..v.len() {
        if !used[t] && v.letter(t) == u.letter(j) {
            used[t] = true;
            image.push(t);
            brute_rec(u, v, q, used, image, total);
            image.pop();
            used[t] = false;
        }
    }
}

fn check_size(n: usize, alphabet: usize) -> Result<usize> {
    let size = (alphabet as u128).pow(n as u32);
    if size > MAX_DENSE_GRAM as u128 {
        return Err(Error::SizeGuard {
            size: size.min(usize::MAX as u128) as usize,
            limit: MAX_DENSE_GRAM,
        });
    }
    Ok(size as usize)
}

/// Level-`n` Gram matrix by brute-force enumeration (`n ≤ 5`).
pub fn gram_brute(n: usize, params: QParams) -> Result<DMatrix<f64>> {
    if n > 5 {
        return Err(Error::LengthGuard {
            what: "brute-force Gram matrix",
            len: n,
            limit: 5,
        });
    }
    let size = check_size(n, params.alphabet)?;
    let words: Vec<Word> = Word::all(n, params.alphabet).collect();
    let mut g = DMatrix::zeros(size, size);
    for (a, u) in words.iter().enumerate() {
        for (b, v) in words.iter().enumerate() {
            g[(a, b)] = q_inner_brute(u, v, params)?;
        }
    }
    Ok(g)
}

type GramKey = (usize, usize, u64);

fn cache() -> &'static RwLock<HashMap<GramKey, Arc<DMatrix<f64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<GramKey, Arc<DMatrix<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Level-`n` Gram matrix from the recursion `Γ_n = (1⊗Γ_{n−1}) M_n`, where
/// `M_n = Σ_j q^{j−1}` times the permutation moving the `j`-th tensor factor
/// to the front. Results are cached per `(n, N, q)`.
pub fn gram_recursive(n: usize, params: QParams) -> Result<Arc<DMatrix<f64>>> {
    check_size(n, params.alphabet)?;
    let key = (n, params.alphabet, params.q.to_bits());
    if let Some(g) = cache().read().expect("gram cache").get(&key) {
        return Ok(g.clone());
    }
    let g = Arc::new(build_level(n, params)?);
    cache().write().expect("gram cache").entry(key).or_insert(g.clone());
    Ok(g)
}

fn build_level(n: usize, params: QParams) -> Result<DMatrix<f64>> {
    let alphabet = params.alphabet;
    if n == 0 {
        return Ok(DMatrix::identity(1, 1));
    }
    if n == 1 {
        return Ok(DMatrix::identity(alphabet, alphabet));
    }
    let prev = gram_recursive(n - 1, params)?;
    let size = alphabet.pow(n as u32);
    let block = alphabet.pow(n as u32 - 1);
    let words: Vec<Word> = Word::all(n, alphabet).collect();
    let mut g = DMatrix::zeros(size, size);
    // Γ_n[u, w] = Σ_j q^{j−1} δ(u_1, w_j) Γ_{n−1}[u_2…u_n, w with w_j removed]
    for (b, w) in words.iter().enumerate() {
        let mut weight = 1.0;
        for j in 0..n {
            let a = w.letter(j) - 1;
            let rest = w.without(j).index(alphabet);
            for s in 0..block {
                g[(a * block + s, b)] += weight * prev[(s, rest)];
            }
            weight *= params.q;
        }
    }
    Ok(g)
}

/// `Γ_n v` without forming the matrix, via
/// `Γ_n v = Σ_a l_a Γ_{n−1} l_a^* v` on level `n`.
pub fn gram_apply(n: usize, params: QParams, v: &[f64]) -> Vec<f64> {
    let alphabet = params.alphabet;
    if n <= 1 {
        return v.to_vec();
    }
    let size = alphabet.pow(n as u32);
    if size <= 256 {
        if let Ok(g) = gram_recursive(n, params) {
            return (g.as_ref() * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec();
        }
    }
    let block = size / alphabet;
    let mut out = vec![0.0; size];
    let mut y = vec![0.0; block];
    for a in 1..=alphabet {
        y.iter_mut().for_each(|x| *x = 0.0);
        annihilate_level(v, &mut y, n, alphabet, a, params.q);
        let z = gram_apply(n - 1, params, &y);
        out[(a - 1) * block..a * block].copy_from_slice(&z);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64, n: usize) -> QParams {
        QParams::new(q, n).unwrap()
    }

    #[test]
    fn brute_examples() {
        let q = 0.35;
        let w = Word::from_letters;
        assert!((q_inner_brute(&w(&[1, 1]), &w(&[1, 1]), p(q, 2)).unwrap() - (1.0 + q)).abs() < 1e-15);
        assert!((q_inner_brute(&w(&[1, 2]), &w(&[2, 1]), p(q, 2)).unwrap() - q).abs() < 1e-15);
        assert_eq!(q_inner_brute(&w(&[1]), &w(&[2]), p(q, 2)).unwrap(), 0.0);
        assert_eq!(q_inner_brute(&w(&[1]), &w(&[1, 1]), p(q, 2)).unwrap(), 0.0);
        assert!(q_inner_brute(&Word::repeat(1, 9), &Word::repeat(1, 9), p(q, 1)).is_err());
    }

    #[test]
    fn recursion_matches_brute_force() {
        for &q in &[0.0, 0.3, -0.45] {
            for alphabet in 1usize..=3 {
                for n in 0..=4 {
                    if alphabet.pow(n as u32) > 81 {
                        continue;
                    }
                    let b = gram_brute(n, p(q, alphabet)).unwrap();
                    let r = gram_recursive(n, p(q, alphabet)).unwrap();
                    assert!((&b - r.as_ref()).abs().max() < 1e-13, "q={q} N={alphabet} n={n}");
                }
            }
        }
    }

    #[test]
    fn small_gram_examples() {
        let q = 0.2;
        assert_eq!(*gram_recursive(1, p(q, 3)).unwrap(), DMatrix::identity(3, 3));
        assert!((gram_recursive(2, p(q, 1)).unwrap()[(0, 0)] - 1.2).abs() < 1e-15);
        let g = gram_recursive(2, p(q, 2)).unwrap();
        let mut eig: Vec<f64> = g.as_ref().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] - 0.8).abs() < 1e-14 && (eig[3] - 1.2).abs() < 1e-14);
    }

    #[test]
    fn matrix_free_application_matches_dense() {
        let params = p(0.27, 2);
        let n = 9;
        let g = gram_recursive(n, params).unwrap();
        let v: Vec<f64> = (0..512).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect();
        let dense = g.as_ref() * nalgebra::DVector::from_column_slice(&v);
        let free = gram_apply(n, params, &v);
        for (a, b) in dense.iter().zip(&free) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        assert!(gram_recursive(13, p(0.1, 2)).is_err());
    }
}
