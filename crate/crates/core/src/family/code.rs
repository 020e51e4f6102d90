use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest default code size.
pub const CODE_CAP: usize = 4096;

/// `min(⌈2^{m/16}⌉, CODE_CAP)`.
pub fn default_code_target(m: usize) -> usize {
    guaranteed_size(m).min(CODE_CAP)
}

/// `⌈2^{m/16}⌉`, saturating.
pub fn guaranteed_size(m: usize) -> usize {
    if m >= 16 * 40 {
        return usize::MAX;
    }
    2f64.powf(m as f64 / 16.0).ceil() as usize
}

/// Sign vectors in `{±1}^m`, stored as bit sets (bit set means −1), with
/// pairwise `ℓ₁` distance at least `m/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCode {
    pub m: usize,
    words: Vec<Vec<u64>>,
    /// Exhaustively verified minimum pairwise `ℓ₁` distance; `None` for a
    /// single word.
    pub min_l1_distance: Option<usize>,
}

impl SignCode {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Entry `i` of word `j` as `±1`.
    pub fn sign(&self, j: usize, i: usize) -> f64 {
        if self.words[j][i / 64] >> (i % 64) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn word(&self, j: usize) -> Vec<i8> {
        (0..self.m).map(|i| self.sign(j, i) as i8).collect()
    }

    pub fn word_string(&self, j: usize) -> String {
        (0..self.m)
            .map(|i| if self.sign(j, i) > 0.0 { '+' } else { '-' })
            .collect()
    }

    /// Number of coordinates in which words `a` and `b` differ.
    pub fn hamming(&self, a: usize, b: usize) -> usize {
        hamming(&self.words[a], &self.words[b])
    }

    /// Indices where words `a` and `b` differ.
    pub fn differing(&self, a: usize, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (blk, (x, y)) in self.words[a].iter().zip(&self.words[b]).enumerate() {
            let mut diff = x ^ y;
            while diff != 0 {
                let bit = diff.trailing_zeros() as usize;
                out.push(blk * 64 + bit);
                diff &= diff - 1;
            }
        }
        out
    }

    /// Keeps the first `n` words.
    pub fn truncated(&self, n: usize) -> SignCode {
        let words: Vec<Vec<u64>> = self.words.iter().take(n).cloned().collect();
        let min_l1_distance = min_distance(&words).map(|h| 2 * h);
        SignCode {
            m: self.m,
            words,
            min_l1_distance,
        }
    }
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum()
}

fn min_distance(words: &[Vec<u64>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let h = hamming(a, b);
            best = Some(best.map_or(h, |v| v.min(h)));
        }
    }
    best
}

/// Randomized Gilbert–Varshamov construction. Starts from the all-plus and
/// all-minus words, then draws uniform words and keeps those at Hamming
/// distance at least `m/4` from every kept word.
pub fn gv_code(m: usize, target: Option<usize>, seed: u64, max_tries: usize) -> Result<SignCode> {
    if m == 0 {
        return Err(Error::invalid("m", "code length must be positive"));
    }
    let target = target.unwrap_or_else(|| default_code_target(m)).max(1);
    let blocks = m.div_ceil(64);
    let tail_mask = if m.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << (m % 64)) - 1
    };
    let masked = |mut w: Vec<u64>| {
        *w.last_mut().expect("nonempty") &= tail_mask;
        w
    };
    let far_enough = |words: &[Vec<u64>], w: &[u64]| words.iter().all(|v| 4 * hamming(v, w) >= m);

    let mut words: Vec<Vec<u64>> = vec![vec![0u64; blocks]];
    let minus = masked(vec![u64::MAX; blocks]);
    if words.len() < target && far_enough(&words, &minus) {
        words.push(minus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tries = 0;
    while words.len() < target && tries < max_tries {
        tries += 1;
        let w = masked((0..blocks).map(|_| rng.gen::<u64>()).collect());
        if far_enough(&words, &w) {
            words.push(w);
        }
    }
    let min_h = min_distance(&words);
    if let Some(h) = min_h {
        if 4 * h < m {
            return Err(Error::invalid(
                "code",
                "verification found words closer than m/4",
            ));
        }
    }
    let required = target.min(guaranteed_size(m));
    if words.len() < required {
        return Err(Error::CodeTooSmall {
            achieved: words.len(),
            required,
        });
    }
    Ok(SignCode {
        m,
        words,
        min_l1_distance: min_h.map(|h| 2 * h),
    })
}
