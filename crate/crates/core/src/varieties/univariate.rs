//! Dense univariate polynomials over `F_p`: arithmetic, root finding and
//! characteristic polynomials. Coefficients are stored from the constant term up.

use rand::Rng;

use crate::exactalg::Field;

pub type UPoly = Vec<u32>;

pub fn trim(mut a: UPoly) -> UPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(field: &Field, a: &[u32], b: &[u32]) -> UPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| field.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect();
    trim(out)
}

pub fn mul(field: &Field, a: &[u32], b: &[u32]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem(field: &Field, a: &[u32], b: &[u32]) -> (UPoly, UPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let inv = field.inv(b[db]);
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = field.mul(r[dr], inv);
        q[dr - db] = c;
        for (i, &bi) in b[..=db].iter().enumerate() {
            r[dr - db + i] = field.sub(r[dr - db + i], field.mul(c, bi));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(field: &Field, a: &[u32], b: &[u32]) -> UPoly {
    divrem(field, a, b).1
}

pub fn monic(field: &Field, a: &[u32]) -> UPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = field.inv(a[d]);
            a[..=d].iter().map(|&c| field.mul(c, inv)).collect()
        }
    }
}

pub fn gcd(field: &Field, a: &[u32], b: &[u32]) -> UPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(field, &x, &y);
        x = y;
        y = r;
    }
    monic(field, &x)
}

/// `base^e mod m`.
pub fn powmod(field: &Field, base: &[u32], mut e: u64, m: &[u32]) -> UPoly {
    let mut result: UPoly = rem(field, &[1], m);
    let mut b = rem(field, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(field, &mul(field, &result, &b), m);
        }
        b = rem(field, &mul(field, &b, &b), m);
        e >>= 1;
    }
    result
}

pub fn eval(field: &Field, a: &[u32], x: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
}

/// The distinct roots in `F_p`, sorted.
pub fn roots<R: Rng>(field: &Field, f: &[u32], rng: &mut R) -> Vec<u32> {
    let f = monic(field, f);
    let Some(d) = degree(&f) else { return Vec::new() };
    if d == 0 {
        return Vec::new();
    }
    let p = field.p();
    let xp = powmod(field, &[0, 1], p, &f);
    let g = gcd(field, &f, &sub(field, &xp, &[0, 1]));
    let mut out = Vec::new();
    split(field, &g, rng, &mut out);
    out.sort_unstable();
    out
}

fn split<R: Rng>(field: &Field, g: &[u32], rng: &mut R, out: &mut Vec<u32>) {
    match degree(g) {
        None | Some(0) => {}
        Some(1) => out.push(field.neg(field.mul(g[0], field.inv(g[1])))),
        Some(d) => {
            let p = field.p();
            loop {
                let a = rng.gen_range(0..p) as u32;
                let h = powmod(field, &[a, 1], (p - 1) / 2, g);
                let c = gcd(field, g, &sub(field, &h, &[1]));
                let dc = degree(&c).unwrap_or(0);
                if dc > 0 && dc < d {
                    let (q, _) = divrem(field, g, &c);
                    split(field, &c, rng, out);
                    split(field, &monic(field, &q), rng, out);
                    return;
                }
            }
        }
    }
}

/// Multiplicity of the root `x` in `f`.
pub fn root_multiplicity(field: &Field, f: &[u32], x: u32) -> usize {
    let lin = [field.neg(x), 1];
    let mut g = trim(f.to_vec());
    let mut m = 0;
    while degree(&g).is_some() {
        let (q, r) = divrem(field, &g, &lin);
        if !r.is_empty() {
            break;
        }
        g = q;
        m += 1;
    }
    m
}

/// The polynomial of degree `< n` through `n` points with distinct abscissas.
pub fn interpolate(field: &Field, xs: &[u32], ys: &[u32]) -> UPoly {
    let mut out: UPoly = Vec::new();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis: UPoly = vec![1];
        let mut denom = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis = mul(field, &basis, &[field.neg(xj), 1]);
                denom = field.mul(denom, field.sub(xi, xj));
            }
        }
        let c = field.mul(yi, field.inv(denom));
        let term: UPoly = basis.iter().map(|&b| field.mul(b, c)).collect();
        let n = out.len().max(term.len());
        out = (0..n)
            .map(|k| field.add(out.get(k).copied().unwrap_or(0), term.get(k).copied().unwrap_or(0)))
            .collect();
    }
    trim(out)
}

/// Characteristic polynomial `det(x I - M)` of a dense square matrix, via
/// reduction to upper Hessenberg form.
pub fn char_poly(field: &Field, m: &[Vec<u32>]) -> UPoly {
    let n = m.len();
    let mut h: Vec<Vec<u32>> = m.to_vec();
    for col in 0..n.saturating_sub(2) {
        let Some(piv) = (col + 1..n).find(|&r| h[r][col] != 0) else { continue };
        if piv != col + 1 {
            h.swap(piv, col + 1);
            for row in h.iter_mut() {
                row.swap(piv, col + 1);
            }
        }
        let inv = field.inv(h[col + 1][col]);
        for r in col + 2..n {
            let c = field.mul(h[r][col], inv);
            if c == 0 {
                continue;
            }
            for k in 0..n {
                let v = field.mul(c, h[col + 1][k]);
                h[r][k] = field.sub(h[r][k], v);
            }
            for row in h.iter_mut() {
                let v = field.mul(c, row[r]);
                row[col + 1] = field.add(row[col + 1], v);
            }
        }
    }
    // Recurrence on leading principal minors of x I - H.
    let mut polys: Vec<UPoly> = vec![vec![1]];
    for k in 0..n {
        let mut next = mul(field, &polys[k], &[field.neg(h[k][k]), 1]);
        let mut prod = 1u32;
        for i in (0..k).rev() {
            prod = field.mul(prod, h[i + 1][i]);
            let c = field.mul(prod, h[i][k]);
            let term: UPoly = polys[i].iter().map(|&v| field.mul(v, c)).collect();
            next = sub(field, &next, &term);
        }
        polys.push(next);
    }
    polys.pop().expect("at least the empty minor")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::DEFAULT_PRIME;
    use rand::SeedableRng;

    #[test]
    fn finds_all_split_roots() {
        let f = Field::new(DEFAULT_PRIME);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rs = [3u32, 17, 123_456, 999_999_937];
        let mut poly: UPoly = vec![1];
        for &r in &rs {
            poly = mul(&f, &poly, &[f.neg(r), 1]);
        }
        // An irreducible quadratic factor x^2 - n for a non-residue n.
        let nonres = (2..).find(|&n: &u32| f.pow(n, (f.p() - 1) / 2) != 1).unwrap();
        poly = mul(&f, &poly, &[f.neg(nonres), 0, 1]);
        let mut want = rs.to_vec();
        want.sort_unstable();
        assert_eq!(roots(&f, &poly, &mut rng), want);
    }

    #[test]
    fn char_poly_of_companion() {
        let f = Field::new(DEFAULT_PRIME);
        // Companion matrix of x^3 - 2x^2 + 5x - 7.
        let c = vec![
            vec![0, 0, 7],
            vec![1, 0, f.neg(5)],
            vec![0, 1, 2],
        ];
        assert_eq!(char_poly(&f, &c), vec![f.neg(7), 5, f.neg(2), 1]);
    }

    #[test]
    fn interpolation_roundtrip() {
        let f = Field::new(DEFAULT_PRIME);
        let poly = vec![5, 0, 3, 1];
        let xs: Vec<u32> = (1..=4).collect();
        let ys: Vec<u32> = xs.iter().map(|&x| eval(&f, &poly, x)).collect();
        assert_eq!(interpolate(&f, &xs, &ys), poly);
    }
}
