//! Image (PGM) and ratings (MovieLens `u.data`) ingestion.

use std::collections::HashSet;
use std::path::Path;

use bfgd_core::linalg::DenseMatrix;
use bfgd_core::objectives::{LeastSquaresSensing, OneBitLogistic};
use bfgd_core::operators::{LinearMap, MaskOperator, SensingMap};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{io_err, HarnessError, Result};
use crate::instances::observed_count;

/// Walks the PGM header, tracking line numbers for diagnostics.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Header<'a> {
    fn err(&self, msg: impl Into<String>) -> HarnessError {
        HarnessError::Pgm {
            line: self.line,
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                if b == b'\n' {
                    self.line += 1;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token().ok_or_else(|| self.err(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err(format!("{what} is not a nonnegative integer")))
    }
}

/// Decode an 8-bit P2 or P5 image into `[0, 1]`.
pub fn parse_pgm(bytes: &[u8]) -> Result<DenseMatrix> {
    let mut h = Header {
        bytes,
        pos: 0,
        line: 1,
    };
    let binary = match h.token() {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(h.err("expected magic P2 or P5")),
    };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(h.err("image has zero size"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(h.err(format!("maxval {maxval} is not 8-bit")));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        h.pos += 1;
        let raster = bytes.get(h.pos..).unwrap_or(&[]);
        if raster.len() < count {
            return Err(h.err(format!("raster has {} of {count} bytes", raster.len())));
        }
        for (k, &b) in raster[..count].iter().enumerate() {
            if usize::from(b) > maxval {
                h.pos += k;
                return Err(h.err(format!("pixel {b} exceeds maxval {maxval}")));
            }
            pixels.push(f64::from(b));
        }
    } else {
        for _ in 0..count {
            let v = h.number("pixel")?;
            if v > maxval {
                return Err(h.err(format!("pixel {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as f64);
        }
    }
    let scale = 1.0 / maxval as f64;
    Ok(DenseMatrix::new(height, width, pixels.into_iter().map(|p| p * scale).collect())?)
}

pub struct ImageInstance {
    pub obj: LeastSquaresSensing,
    pub reference: DenseMatrix,
}

/// Masked least squares on a uniformly sampled fraction of a matrix.
pub fn masked_completion(reference: DenseMatrix, fraction: f64, seed: u64) -> Result<ImageInstance> {
    let (m, n) = reference.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = MaskOperator::sample(m, n, observed_count(m, n, fraction), &mut rng)?;
    let map = SensingMap::from(mask);
    let y = map.apply(&reference)?;
    Ok(ImageInstance {
        obj: LeastSquaresSensing::new(map, y)?,
        reference,
    })
}

pub fn ingest_image(path: &Path, observe_fraction: f64, seed: u64) -> Result<ImageInstance> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    masked_completion(parse_pgm(&bytes)?, observe_fraction, seed)
}

/// One parsed rating, with zero-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
}

/// Parse `user⟨TAB⟩item⟨TAB⟩rating[⟨TAB⟩timestamp]` lines with 1-based IDs
/// and integer ratings in 1..=5.
pub fn parse_ratings(text: &str) -> Result<Vec<Rating>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |msg: String| HarnessError::Ratings { line, msg };
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.trim_end_matches('\r').split('\t').collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(err(format!("expected 3 or 4 tab-separated fields, got {}", fields.len())));
        }
        let id = |s: &str, what: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(err(format!("{what} id {s:?} is not a positive integer"))),
            }
        };
        let user = id(fields[0], "user")?;
        let item = id(fields[1], "item")?;
        let rating: u32 = fields[2]
            .trim()
            .parse()
            .map_err(|_| err(format!("rating {:?} is not an integer", fields[2])))?;
        if !(1..=5).contains(&rating) {
            return Err(err(format!("rating {rating} outside 1..=5")));
        }
        if !seen.insert((user, item)) {
            return Err(err(format!("duplicate rating for user {} item {}", user + 1, item + 1)));
        }
        out.push(Rating {
            user,
            item,
            rating: f64::from(rating),
        });
    }
    if out.is_empty() {
        return Err(HarnessError::Ratings {
            line: 0,
            msg: "no ratings".into(),
        });
    }
    Ok(out)
}

pub struct RatingsInstance {
    pub obj: OneBitLogistic,
    pub test_set: Vec<(usize, usize, f64)>,
    pub global_mean: f64,
    pub shape: (usize, usize),
}

/// Binarize ratings against their global mean, and hold out `holdout`
/// uniformly chosen entries as the test set.
pub fn ratings_instance(ratings: &[Rating], holdout: usize, seed: u64) -> Result<RatingsInstance> {
    if holdout >= ratings.len() {
        return Err(HarnessError::Config(format!(
            "holdout {holdout} leaves no training ratings out of {}",
            ratings.len()
        )));
    }
    let m = ratings.iter().map(|r| r.user).max().unwrap_or(0) + 1;
    let n = ratings.iter().map(|r| r.item).max().unwrap_or(0) + 1;
    let global_mean = ratings.iter().map(|r| r.rating).sum::<f64>() / ratings.len() as f64;
    let label = |r: &Rating| if r.rating > global_mean { 1.0 } else { -1.0 };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let held: HashSet<usize> = index::sample(&mut rng, ratings.len(), holdout).into_iter().collect();
    let mut train = Vec::with_capacity(ratings.len() - holdout);
    let mut test_set = Vec::with_capacity(holdout);
    for (k, r) in ratings.iter().enumerate() {
        if held.contains(&k) {
            test_set.push((r.user, r.item, label(r)));
        } else {
            train.push(((r.user, r.item), label(r)));
        }
    }
    train.sort_by_key(|&(ij, _)| ij);
    let mask = MaskOperator::new(m, n, train.iter().map(|&(ij, _)| ij).collect())?;
    let labels = train.into_iter().map(|(_, l)| l).collect();
    Ok(RatingsInstance {
        obj: OneBitLogistic::new(mask, labels)?,
        test_set,
        global_mean,
        shape: (m, n),
    })
}

pub fn ingest_movielens(path: &Path, holdout: usize, seed: u64) -> Result<RatingsInstance> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    ratings_instance(&parse_ratings(&text)?, holdout, seed)
}
