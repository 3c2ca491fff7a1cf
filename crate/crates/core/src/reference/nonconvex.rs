//! Reference solution for the scalar law with flux `(u² - 1)(u² - 4) / 4`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::physics::{scalar_flux, scalar_speed, ScalarFlux};

/// Resolution of the cached fine-grid reference.
pub const NONCONVEX_REFERENCE_POINTS: usize = 16385;

const DOMAIN: (f64, f64) = (-1.0, 1.0);
const STATES: (f64, f64) = (-3.0, 3.0);

/// Largest `|f'(u)|` over the interval between `a` and `b`.
fn speed_bound(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let crit = (2.5f64 / 3.0).sqrt();
    let mut m = scalar_speed(lo, ScalarFlux::Nonconvex)
        .abs()
        .max(scalar_speed(hi, ScalarFlux::Nonconvex).abs());
    for c in [-crit, crit] {
        if lo < c && c < hi {
            m = m.max(scalar_speed(c, ScalarFlux::Nonconvex).abs());
        }
    }
    m
}

/// First-order local Lax–Friedrichs solution of the Riemann problem on
/// `points` equally spaced nodes of [-1, 1], with constant extrapolation at
/// both ends.
pub fn llf_nonconvex(points: usize, t: f64) -> Result<Vec<f64>> {
    if points < 3 {
        return Err(Error::Contract(format!("need at least 3 points, got {points}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let dx = (DOMAIN.1 - DOMAIN.0) / (points - 1) as f64;
    let mut u: Vec<f64> = (0..points)
        .map(|i| {
            if DOMAIN.0 + i as f64 * dx < 0.0 {
                STATES.0
            } else {
                STATES.1
            }
        })
        .collect();
    let vmax = speed_bound(STATES.0, STATES.1);
    let dt_max = 0.9 * dx / vmax;
    let mut flux = vec![0.0; points + 1];
    let mut time = 0.0;
    while time < t {
        let dt = dt_max.min(t - time);
        for (k, f) in flux.iter_mut().enumerate() {
            let a = u[k.saturating_sub(1)];
            let b = u[k.min(points - 1)];
            let fa = scalar_flux(a, ScalarFlux::Nonconvex);
            let fb = scalar_flux(b, ScalarFlux::Nonconvex);
            *f = 0.5 * (fa + fb) - 0.5 * speed_bound(a, b) * (b - a);
        }
        let lam = dt / dx;
        for (i, v) in u.iter_mut().enumerate() {
            *v -= lam * (flux[i + 1] - flux[i]);
        }
        time += dt;
    }
    Ok(u)
}

/// Entropy solution, built from the lower convex envelope of the flux.
///
/// The envelope follows `f` on `[-3, -√2.5]` and `[√2.5, 3]` and is flat in
/// between, so the solution is two fans joined by a stationary jump.
pub fn nonconvex_exact(x: f64, t: f64) -> f64 {
    let edge = 19.5;
    let xi = x / t;
    if xi <= -edge {
        return STATES.0;
    }
    if xi >= edge {
        return STATES.1;
    }
    // f'(u) = u³ - 2.5u is monotone on each branch; solve by bisection
    let (mut lo, mut hi) = if xi < 0.0 {
        (STATES.0, -(2.5f64).sqrt())
    } else {
        ((2.5f64).sqrt(), STATES.1)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if scalar_speed(mid, ScalarFlux::Nonconvex) < xi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// On-disk cache of reference profiles.
///
/// Each entry is a flat little-endian `f64` file plus a text sidecar holding
/// the key and a SHA-256 checksum. Writes go through a temporary file and a
/// rename so readers never see a partial entry.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReferenceCache { dir: dir.into() }
    }

    /// Cache in `$SPECSHOCK_CACHE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os("SPECSHOCK_CACHE").map(Self::new)
    }

    fn stem(example: u8, n: usize, t: f64) -> String {
        format!("example{example}_n{n}_t{t:e}")
    }

    fn checksum(bytes: &[u8]) -> String {
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn load(&self, example: u8, n: usize, t: f64) -> Option<Vec<f64>> {
        let stem = Self::stem(example, n, t);
        let bytes = fs::read(self.dir.join(format!("{stem}.bin"))).ok()?;
        let sidecar = fs::read_to_string(self.dir.join(format!("{stem}.txt"))).ok()?;
        let sum = sidecar.lines().find_map(|l| l.strip_prefix("sha256 = "))?;
        if sum.trim() != Self::checksum(&bytes) || bytes.len() != 8 * n {
            return None;
        }
        Some(
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        )
    }

    pub fn store(&self, example: u8, n: usize, t: f64, values: &[f64]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let stem = Self::stem(example, n, t);
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        let sidecar = format!(
            "example = {example}\nn = {n}\nt = {t:?}\nsha256 = {}\n",
            Self::checksum(&bytes)
        );
        write_atomic(&self.dir.join(format!("{stem}.bin")), &bytes)?;
        write_atomic(&self.dir.join(format!("{stem}.txt")), sidecar.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(tmp, path)
}

fn memo() -> &'static Mutex<HashMap<(usize, u64), Vec<f64>>> {
    type Memo = Mutex<HashMap<(usize, u64), Vec<f64>>>;
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn fine_profile(t: f64, cache: Option<&ReferenceCache>) -> Result<Vec<f64>> {
    let n = NONCONVEX_REFERENCE_POINTS;
    let key = (n, t.to_bits());
    if let Some(v) = memo().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = match cache.and_then(|c| c.load(5, n, t)) {
        Some(v) => v,
        None => {
            let v = llf_nonconvex(n, t)?;
            if let Some(c) = cache {
                // a failed write only costs a recomputation next time
                let _ = c.store(5, n, t, &v);
            }
            v
        }
    };
    memo().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Fine-grid reference at the points `xs`, linearly interpolated.
///
/// The profile is computed once per process and, when `$SPECSHOCK_CACHE` is
/// set, persisted across runs.
pub fn nonconvex_reference(xs: &[f64], t: f64) -> Result<Vec<f64>> {
    let fine = fine_profile(t, ReferenceCache::from_env().as_ref())?;
    let n = fine.len();
    let dx = (DOMAIN.1 - DOMAIN.0) / (n - 1) as f64;
    Ok(xs
        .iter()
        .map(|&x| {
            let s = ((x - DOMAIN.0) / dx).clamp(0.0, (n - 1) as f64);
            let i = (s.floor() as usize).min(n - 2);
            let w = s - i as f64;
            (1.0 - w) * fine[i] + w * fine[i + 1]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_branches() {
        assert_eq!(nonconvex_exact(-0.9, 0.04), -3.0);
        assert_eq!(nonconvex_exact(0.9, 0.04), 3.0);
        let u = nonconvex_exact(-0.2, 0.04);
        assert!((scalar_speed(u, ScalarFlux::Nonconvex) + 5.0).abs() < 1e-12);
        assert!(nonconvex_exact(-1e-9, 0.04) < -1.58 && nonconvex_exact(1e-9, 0.04) > 1.58);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = ReferenceCache::new(dir.path());
        let v = vec![1.0, -2.5, f64::MIN_POSITIVE];
        c.store(5, 3, 0.04, &v).unwrap();
        assert_eq!(c.load(5, 3, 0.04), Some(v));
        assert_eq!(c.load(5, 3, 0.05), None);
        // corrupt the payload: the checksum no longer matches
        let bin = dir.path().join(format!("{}.bin", ReferenceCache::stem(5, 3, 0.04)));
        fs::write(&bin, [0u8; 24]).unwrap();
        assert_eq!(c.load(5, 3, 0.04), None);
    }
}
