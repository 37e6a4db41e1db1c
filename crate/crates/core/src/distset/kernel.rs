//! Integer facet kernel: for a difference vector with integer coordinates over a fixed
//! basis, picks the facet attaining the norm and returns the value as an integer key.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{Ring, RingElem, Sign, Q};
use crate::polynorm::PolygonalNorm;

/// Largest supported key length and per-coordinate basis length.
pub const KEY_LEN: usize = 4;

/// Coordinates of a distance value, scaled by the kernel's common denominator.
pub type Key = [i64; KEY_LEN];

const REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Kernel {
    ring: Ring,
    m: usize,
    dz: usize,
    dk: usize,
    l: BigInt,
    /// `g[(i * dk + r) * 2dz + c]`: key row `r` of half-facet `i`.
    g: Vec<i64>,
    /// `w[i * 2dz + c]`: value of half-facet `i` on basis column `c`, as a double.
    w: Vec<f64>,
    /// `(u_i1, u_i2)` at embedding 0.
    uf: Vec<(f64, f64)>,
    gmax: i64,
    /// Values of the coordinate basis elements, as doubles.
    coord_f64: Vec<f64>,
    threshold: Option<(RingElem, f64)>,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Budget("kernel coefficient exceeds 64 bits".into()))
}

impl Kernel {
    /// Kernel for points `sum_c z_c basis[c]` in each coordinate.
    pub fn compile(p: &PolygonalNorm, basis: &[RingElem], threshold: Option<&Q>) -> Result<Kernel> {
        let ring = p.ring().clone();
        let dz = basis.len();
        if dz == 0 || dz > KEY_LEN {
            return Err(Error::InvalidArgument(format!(
                "basis of length {dz} is outside 1..={KEY_LEN}"
            )));
        }
        for b in basis {
            if !b.ring().same(&ring) {
                return Err(Error::RingMismatch);
            }
        }
        let m = p.half();
        let mut cols: Vec<Vec<RingElem>> = Vec::with_capacity(m);
        let mut dk = 1;
        let mut l = BigInt::one();
        for f in &p.facets()[..m] {
            let mut row = Vec::with_capacity(2 * dz);
            for u in &f.u {
                for b in basis {
                    let e = u * b;
                    dk = dk.max(e.coords().len());
                    for c in e.coords() {
                        l = l.lcm(c.denom());
                    }
                    row.push(e);
                }
            }
            cols.push(row);
        }
        if dk > KEY_LEN {
            return Err(Error::InvalidArgument(format!(
                "distance values need {dk} coordinates (at most {KEY_LEN} supported)"
            )));
        }
        let lq = Q::from_integer(l.clone());
        let mut g = vec![0i64; m * dk * 2 * dz];
        let mut w = vec![0f64; m * 2 * dz];
        let mut gmax = 0i64;
        for (i, row) in cols.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                w[i * 2 * dz + c] = e.to_f64();
                for r in 0..dk {
                    let v = to_i64(&(e.coord(r) * &lq).to_integer())?;
                    gmax = gmax.max(v.abs());
                    g[(i * dk + r) * 2 * dz + c] = v;
                }
            }
        }
        let uf = p.facets()[..m]
            .iter()
            .map(|f| (f.u[0].to_f64(), f.u[1].to_f64()))
            .collect();
        let coord_f64 = (0..dk)
            .map(|r| {
                let mut c = vec![Q::zero(); dk];
                c[r] = Q::one();
                ring.elem(c).to_f64()
            })
            .collect();
        let threshold = threshold.map(|n| (ring.from_q(n.clone()), crate::exactnum::rational::to_f64(n)));
        Ok(Kernel {
            ring,
            m,
            dz,
            dk,
            l,
            g,
            w,
            uf,
            gmax,
            coord_f64,
            threshold,
        })
    }

    pub fn half(&self) -> usize {
        self.m
    }

    pub fn dz(&self) -> usize {
        self.dz
    }

    pub fn dk(&self) -> usize {
        self.dk
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Common denominator of the key coordinates.
    pub fn denominator(&self) -> &BigInt {
        &self.l
    }

    pub fn facet_f64(&self, i: usize) -> (f64, f64) {
        self.uf[i]
    }

    /// Fails when keys for vectors with `|z_c| <= zmax` could overflow.
    pub fn check_range(&self, zmax: i64) -> Result<()> {
        let bound = (self.gmax as i128) * (zmax as i128) * (2 * self.dz) as i128;
        if bound >= (1i128 << 62) {
            return Err(Error::Budget(format!(
                "coordinates up to {zmax} overflow the 64-bit kernel"
            )));
        }
        Ok(())
    }

    #[inline]
    fn key(&self, i: usize, z: &[i64], neg: bool) -> Key {
        let n = 2 * self.dz;
        let mut k = [0i64; KEY_LEN];
        for (r, kr) in k.iter_mut().enumerate().take(self.dk) {
            let row = &self.g[(i * self.dk + r) * n..(i * self.dk + r + 1) * n];
            let mut s = 0i64;
            for (a, b) in row.iter().zip(z) {
                s += a * b;
            }
            *kr = if neg { -s } else { s };
        }
        k
    }

    /// The ring element with coordinates `key / L`.
    pub fn to_elem(&self, key: &Key) -> RingElem {
        let lq = Q::from_integer(self.l.clone());
        self.ring.elem(
            key[..self.dk]
                .iter()
                .map(|&v| Q::from_integer(v.into()) / &lq)
                .collect(),
        )
    }

    fn key_sign(&self, key: &Key) -> Result<Sign> {
        if key.iter().all(|&v| v == 0) {
            return Ok(Sign::Zero);
        }
        if key[1..].iter().all(|&v| v == 0) {
            return Ok(Sign::of(&Q::from_integer(key[0].into())));
        }
        self.to_elem(key).sign()
    }

    /// `(key, half-facet)` of `||z||`, or `None` when it exceeds the threshold.
    ///
    /// `z` holds the basis coordinates of the first and then the second component.
    pub fn classify(&self, z: &[i64], scratch: &mut Vec<f64>) -> Result<Option<(Key, u8)>> {
        debug_assert_eq!(z.len(), 2 * self.dz);
        if z.iter().all(|&x| x == 0) {
            return Ok(Some(([0; KEY_LEN], 0)));
        }
        let n = 2 * self.dz;
        scratch.clear();
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        let mut tol_max: f64 = 0.0;
        for i in 0..self.m {
            let w = &self.w[i * n..(i + 1) * n];
            let mut v = 0.0;
            let mut s = 0.0;
            for (a, &b) in w.iter().zip(z) {
                let t = a * b as f64;
                v += t;
                s += t.abs();
            }
            let tol = REL_TOL * s + 1e-300;
            tol_max = tol_max.max(tol);
            scratch.push(v);
            scratch.push(tol);
            if v.abs() > best_v {
                best_v = v.abs();
                best = i;
            }
        }
        let mut chosen = best;
        let mut chosen_key: Option<Key> = None;
        let floor = best_v - 2.0 * tol_max;
        for i in 0..self.m {
            if i == best || scratch[2 * i].abs() < floor {
                continue;
            }
            let ck = match chosen_key {
                Some(k) => k,
                None => self.abs_key(chosen, z, scratch)?,
            };
            let ik = self.abs_key(i, z, scratch)?;
            chosen_key = Some(ck);
            if ik == ck {
                if i < chosen {
                    chosen = i;
                }
                continue;
            }
            let mut diff = [0i64; KEY_LEN];
            for r in 0..KEY_LEN {
                diff[r] = ik[r] - ck[r];
            }
            if self.key_sign(&diff)? == Sign::Positive {
                chosen = i;
                chosen_key = Some(ik);
            }
        }
        let key = match chosen_key {
            Some(k) => k,
            None => self.abs_key(chosen, z, scratch)?,
        };
        if let Some((nv, nf)) = &self.threshold {
            let v = scratch[2 * chosen].abs();
            let tol = scratch[2 * chosen + 1];
            if v > nf + tol + REL_TOL * nf {
                return Ok(None);
            }
            if v >= nf - tol - REL_TOL * nf {
                let d = nv - &self.to_elem(&key);
                if d.sign()? == Sign::Negative {
                    return Ok(None);
                }
            }
        }
        Ok(Some((key, chosen as u8)))
    }

    /// Key of `|l_i(z)|`.
    fn abs_key(&self, i: usize, z: &[i64], scratch: &[f64]) -> Result<Key> {
        let v = scratch[2 * i];
        let tol = scratch[2 * i + 1];
        let k = self.key(i, z, false);
        let neg = if v.abs() > 4.0 * tol {
            v < 0.0
        } else {
            self.key_sign(&k)? == Sign::Negative
        };
        Ok(if neg { self.key(i, z, true) } else { k })
    }

    /// Approximate value of a key.
    pub fn key_f64(&self, key: &Key) -> f64 {
        let l = crate::exactnum::rational::to_f64(&Q::from_integer(self.l.clone()));
        key[..self.dk]
            .iter()
            .zip(&self.coord_f64)
            .map(|(&k, c)| k as f64 * c)
            .sum::<f64>()
            / l
    }

    /// Exact order of two keys by value.
    pub fn cmp_keys(&self, a: &Key, b: &Key) -> Result<std::cmp::Ordering> {
        let mut d = [0i64; KEY_LEN];
        for r in 0..KEY_LEN {
            d[r] = a[r] - b[r];
        }
        Ok(match self.key_sign(&d)? {
            Sign::Negative => std::cmp::Ordering::Less,
            Sign::Zero => std::cmp::Ordering::Equal,
            Sign::Positive => std::cmp::Ordering::Greater,
        })
    }

    /// Value in doubles of `||z||`, without certification.
    pub fn value_f64(&self, z: &[i64]) -> f64 {
        let n = 2 * self.dz;
        (0..self.m)
            .map(|i| {
                self.w[i * n..(i + 1) * n]
                    .iter()
                    .zip(z)
                    .map(|(a, &b)| a * b as f64)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Lowest common multiple of the denominators of every coordinate.
pub fn common_denominator<'a>(elems: impl IntoIterator<Item = &'a RingElem>) -> BigInt {
    let mut d = BigInt::one();
    for e in elems {
        for c in e.coords() {
            d = d.lcm(c.denom());
        }
    }
    if d.is_zero() {
        BigInt::one()
    } else {
        d.abs()
    }
}
