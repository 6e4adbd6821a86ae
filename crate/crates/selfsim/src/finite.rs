//! Finite marked groups: matrix groups over `ℤ/m`, permutation groups and
//! explicit multiplication tables, materialized by closure.
//!
//! Lamp groups for the wreath constructions are marked either by
//! `(u1, v1, v2)`, images of `U = ℤ/2` and `V = (ℤ/2)²`, or by
//! `(a, b, c, d)`, images of `⟨a⟩ ∗ ⟨b, c⟩`.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::Serialize;

use crate::config::{parse_ints, KvConfig};
use crate::error::{Error, Result};
use crate::marked::{full_growth, BallOptions, GrowthProfile, MarkedGroup};
use crate::word::{Letter, Word};

/// Labels of lamp groups marked by the two free factors `U` and `V`.
pub const UV_LABELS: [&str; 3] = ["u1", "v1", "v2"];
/// Labels of lamp groups marked by the tree alphabet.
pub const TREE_LABELS: [&str; 4] = ["a", "b", "c", "d"];

pub const DEFAULT_MAX_ORDER: usize = 2_000_000;
const DENSE_TABLE_LIMIT: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FiniteKind {
    /// `dim × dim` matrices over `ℤ/modulus`, row-major; with `projective`
    /// set, `A` and `−A` are identified.
    Matrix { dim: usize, modulus: u32, projective: bool, gens: Vec<Vec<u32>> },
    /// Permutations of `0..degree`; `gens[i][x]` is the image of `x`.
    Perm { degree: usize, gens: Vec<Vec<u32>> },
    /// `table[x][y] = x·y` with `0` the identity.
    Table { table: Vec<Vec<u32>>, gens: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroupSpec {
    pub name: String,
    pub labels: Vec<String>,
    pub kind: FiniteKind,
}

impl FiniteGroupSpec {
    fn validate_shape(&self) -> Result<()> {
        let n = match &self.kind {
            FiniteKind::Matrix { dim, modulus, gens, .. } => {
                if *dim == 0 || *modulus < 2 {
                    return Err(Error::invalid("matrix groups need dim >= 1 and modulus >= 2"));
                }
                if gens.iter().any(|g| g.len() != dim * dim || g.iter().any(|&x| x >= *modulus)) {
                    return Err(Error::invalid("matrix generator has wrong size or unreduced entries"));
                }
                gens.len()
            }
            FiniteKind::Perm { degree, gens } => {
                for g in gens {
                    let mut hit = vec![false; *degree];
                    if g.len() != *degree {
                        return Err(Error::invalid("permutation of wrong degree"));
                    }
                    for &x in g {
                        if x as usize >= *degree || std::mem::replace(&mut hit[x as usize], true) {
                            return Err(Error::invalid("generator is not a permutation"));
                        }
                    }
                }
                gens.len()
            }
            FiniteKind::Table { table, gens } => {
                let k = table.len();
                if k == 0 || table.iter().any(|r| r.len() != k || r.iter().any(|&x| x as usize >= k)) {
                    return Err(Error::invalid("multiplication table is not square over its elements"));
                }
                if (0..k).any(|i| table[0][i] != i as u32 || table[i][0] != i as u32) {
                    return Err(Error::invalid("element 0 of a table must be the identity"));
                }
                if gens.iter().any(|&g| g as usize >= k) {
                    return Err(Error::invalid("table generator out of range"));
                }
                gens.len()
            }
        };
        if n != self.labels.len() {
            return Err(Error::invalid("number of labels differs from number of generators"));
        }
        Ok(())
    }

    /// Reads a spec from configuration keys:
    ///
    /// - `lamp = <library name>` (see [`library`]), or
    /// - `kind = matrix` with `modulus`, `dim`, `projective` and `gen.<label> = rows separated by ;`,
    /// - `kind = perm` with `degree` and `gen.<label> = images`,
    /// - `kind = table` with `row.<i> = products` and `gen.<label> = element`.
    pub fn from_config(c: &KvConfig) -> Result<Self> {
        if let Some(name) = c.get("lamp") {
            return library(name);
        }
        let name = c.get("name").unwrap_or("custom").to_string();
        let gens: Vec<(String, String)> =
            c.with_prefix("gen.").map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let labels: Vec<String> = gens.iter().map(|(k, _)| k.clone()).collect();
        let kind = match c.require("kind")? {
            "matrix" => {
                let modulus: u32 = c.parse_value("modulus")?.ok_or_else(|| Error::invalid("missing modulus"))?;
                let dim: usize = c.parse_or("dim", 2)?;
                let projective: bool = c.parse_or("projective", false)?;
                let mats = gens
                    .iter()
                    .map(|(_, v)| {
                        let flat: Vec<i64> = parse_ints(&v.replace(';', " "))?;
                        Ok(flat.iter().map(|x| x.rem_euclid(modulus as i64) as u32).collect())
                    })
                    .collect::<Result<Vec<Vec<u32>>>>()?;
                FiniteKind::Matrix { dim, modulus, projective, gens: mats }
            }
            "perm" => {
                let degree: usize = c.parse_value("degree")?.ok_or_else(|| Error::invalid("missing degree"))?;
                let perms = gens.iter().map(|(_, v)| parse_ints(v)).collect::<Result<Vec<Vec<u32>>>>()?;
                FiniteKind::Perm { degree, gens: perms }
            }
            "table" => {
                let rows: Vec<(usize, Vec<u32>)> = c
                    .with_prefix("row.")
                    .map(|(k, v)| {
                        let i: usize = k.parse().map_err(|_| Error::invalid(format!("bad row index {k}")))?;
                        Ok((i, parse_ints(v)?))
                    })
                    .collect::<Result<_>>()?;
                let mut table = vec![Vec::new(); rows.len()];
                for (i, r) in rows {
                    *table.get_mut(i).ok_or_else(|| Error::invalid("row index out of range"))? = r;
                }
                let ids = gens
                    .iter()
                    .map(|(_, v)| v.trim().parse::<u32>().map_err(|_| Error::invalid("bad table generator")))
                    .collect::<Result<Vec<u32>>>()?;
                FiniteKind::Table { table, gens: ids }
            }
            k => return Err(Error::invalid(format!("unknown group kind {k}"))),
        };
        let spec = FiniteGroupSpec { name, labels, kind };
        spec.validate_shape()?;
        Ok(spec)
    }
}

fn perm_spec(name: &str, labels: &[&str], degree: usize, gens: Vec<Vec<u32>>) -> FiniteGroupSpec {
    FiniteGroupSpec {
        name: name.to_string(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
        kind: FiniteKind::Perm { degree, gens },
    }
}

fn perm_mul(x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().map(|&i| y[i as usize]).collect()
}

/// Dihedral group of order `2k` acting on `ℤ/k`: rotation `r` and reflection `s`.
fn dihedral_parts(k: usize) -> (Vec<u32>, Vec<u32>) {
    let r = (0..k).map(|i| ((i + 1) % k) as u32).collect();
    let s = (0..k).map(|i| ((k - i) % k) as u32).collect();
    (r, s)
}

fn perm_pow(x: &[u32], e: usize) -> Vec<u32> {
    let mut acc: Vec<u32> = (0..x.len() as u32).collect();
    for _ in 0..e {
        acc = perm_mul(&acc, x);
    }
    acc
}

pub fn trivial_lamp() -> FiniteGroupSpec {
    FiniteGroupSpec {
        name: "trivial".into(),
        labels: UV_LABELS.map(String::from).to_vec(),
        kind: FiniteKind::Table { table: vec![vec![0]], gens: vec![0, 0, 0] },
    }
}

/// `ℤ/2` with `u1 = v1` the generator and `v2` trivial.
pub fn z2_lamp() -> FiniteGroupSpec {
    perm_spec("z2", &UV_LABELS, 2, vec![vec![1, 0], vec![1, 0], vec![0, 1]])
}

/// Klein four-group with `u1 = x`, `v1 = y`, `v2 = xy`.
pub fn klein_lamp() -> FiniteGroupSpec {
    let x = vec![1, 0, 3, 2];
    let y = vec![2, 3, 0, 1];
    let xy = perm_mul(&x, &y);
    perm_spec("klein", &UV_LABELS, 4, vec![x, y, xy])
}

/// Dihedral group of order `2k` (`k` even) with `u1 = sr`, `v1 = s`,
/// `v2 = r^{k/2}`, so that `[u1, v1] = r^{-2}`.
pub fn dihedral_lamp(k: usize) -> Result<FiniteGroupSpec> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::invalid("dihedral lamps need an even rotation order"));
    }
    let (r, s) = dihedral_parts(k);
    let u = perm_mul(&s, &r);
    let half = perm_pow(&r, k / 2);
    Ok(perm_spec(&format!("dihedral{k}"), &UV_LABELS, k, vec![u, s, half]))
}

/// Dihedral group of order `2k` (`k ≡ 0 mod 4`) marked as a quotient of the
/// tree alphabet: `a = s`, `b = s r^{k/2+1}`, `c = r^{k/2}`, `d = s r`.
pub fn dihedral_tree_lamp(k: usize) -> Result<FiniteGroupSpec> {
    if k < 4 || !k.is_multiple_of(4) {
        return Err(Error::invalid("tree-marked dihedral lamps need k divisible by 4"));
    }
    let (r, s) = dihedral_parts(k);
    let c = perm_pow(&r, k / 2);
    let b = perm_mul(&s, &perm_pow(&r, k / 2 + 1));
    let d = perm_mul(&s, &r);
    Ok(perm_spec(&format!("dihedral{k}_abcd"), &TREE_LABELS, k, vec![s, b, c, d]))
}

/// `PSL₂(ℤ/m)` for `m` a power of 5, marked by three involutions: `u1` of
/// trace zero, and the commuting pair `v1 = [[0,1],[-1,0]]`, `v2 = [[0,y],[y,0]]`
/// with `y² = -1`.
pub fn psl2_lamp(modulus: u32) -> Result<FiniteGroupSpec> {
    let m = modulus as u64;
    if modulus < 5 {
        return Err(Error::invalid("PSL2 lamps need modulus >= 5"));
    }
    let y = (1..m)
        .find(|y| (y * y + 1) % m == 0)
        .ok_or_else(|| Error::invalid(format!("-1 is not a square mod {modulus}")))? as u32;
    let u = vec![1, 1, modulus - 2, modulus - 1];
    let v1 = vec![0, 1, modulus - 1, 0];
    let v2 = vec![0, y, y, 0];
    Ok(FiniteGroupSpec {
        name: format!("psl2_{modulus}"),
        labels: UV_LABELS.map(String::from).to_vec(),
        kind: FiniteKind::Matrix { dim: 2, modulus, projective: true, gens: vec![u, v1, v2] },
    })
}

/// Named groups: `trivial`, `z2`, `klein`, `dihedral<k>`, `dihedral<k>_abcd`, `psl2_<m>`.
pub fn library(name: &str) -> Result<FiniteGroupSpec> {
    match name {
        "trivial" => Ok(trivial_lamp()),
        "z2" => Ok(z2_lamp()),
        "klein" => Ok(klein_lamp()),
        _ => {
            if let Some(rest) = name.strip_prefix("psl2_") {
                let m = rest.parse().map_err(|_| Error::invalid(format!("bad modulus in {name}")))?;
                return psl2_lamp(m);
            }
            if let Some(rest) = name.strip_prefix("dihedral") {
                if let Some(k) = rest.strip_suffix("_abcd") {
                    let k = k.parse().map_err(|_| Error::invalid(format!("bad order in {name}")))?;
                    return dihedral_tree_lamp(k);
                }
                let k = rest.parse().map_err(|_| Error::invalid(format!("bad order in {name}")))?;
                return dihedral_lamp(k);
            }
            Err(Error::invalid(format!("unknown library group {name}")))
        }
    }
}

/// A materialized finite group. Elements are indices into the closure, with
/// `0` the identity.
pub struct FiniteGroup {
    pub spec: FiniteGroupSpec,
    keys: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    gens: Vec<u32>,
    inv: Vec<u32>,
    table: Option<Vec<u32>>,
    growth: OnceLock<GrowthProfile>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.spec.name, self.order())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteMetadata {
    pub name: String,
    pub order: usize,
    pub diameter: usize,
    pub growth: Vec<u64>,
}

impl FiniteGroup {
    pub fn new(spec: FiniteGroupSpec) -> Result<Self> {
        Self::with_budget(spec, DEFAULT_MAX_ORDER)
    }

    pub fn with_budget(spec: FiniteGroupSpec, max_order: usize) -> Result<Self> {
        spec.validate_shape()?;
        let id_key = identity_key(&spec.kind);
        let gen_keys: Vec<Vec<u32>> = match &spec.kind {
            FiniteKind::Matrix { gens, .. } => gens.iter().map(|g| normalize(&spec.kind, g.clone())).collect(),
            FiniteKind::Perm { gens, .. } => gens.clone(),
            FiniteKind::Table { gens, .. } => gens.iter().map(|&g| vec![g]).collect(),
        };
        let mut keys = vec![id_key.clone()];
        let mut index = HashMap::from([(id_key, 0u32)]);
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for g in &gen_keys {
                let y = key_mul(&spec.kind, &keys[x as usize], g);
                if !index.contains_key(&y) {
                    if keys.len() >= max_order {
                        return Err(Error::Budget {
                            what: format!("closure of {} exceeds order {max_order}", spec.name),
                            last_radius: None,
                            counts: vec![keys.len() as u64],
                        });
                    }
                    index.insert(y.clone(), keys.len() as u32);
                    queue.push_back(keys.len() as u32);
                    keys.push(y);
                }
            }
        }
        let gens: Vec<u32> = gen_keys.iter().map(|k| index[k]).collect();
        let n = keys.len();
        let mut g = FiniteGroup {
            spec,
            keys,
            index,
            gens,
            inv: Vec::new(),
            table: None,
            growth: OnceLock::new(),
        };
        if n <= DENSE_TABLE_LIMIT {
            let mut t = vec![0u32; n * n];
            for x in 0..n {
                for y in 0..n {
                    t[x * n + y] = g.mul_keys(x as u32, y as u32);
                }
            }
            g.table = Some(t);
        }
        g.inv = (0..n as u32).map(|x| g.find_inverse(x)).collect();
        Ok(g)
    }

    fn mul_keys(&self, x: u32, y: u32) -> u32 {
        let k = key_mul(&self.spec.kind, &self.keys[x as usize], &self.keys[y as usize]);
        self.index[&k]
    }

    fn find_inverse(&self, x: u32) -> u32 {
        let mut y = x;
        loop {
            let z = self.mul(y, x);
            if z == 0 {
                return y;
            }
            y = z;
        }
    }

    pub fn order(&self) -> usize {
        self.keys.len()
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        match &self.table {
            Some(t) => t[x as usize * self.order() + y as usize],
            None => self.mul_keys(x, y),
        }
    }

    pub fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    pub fn key(&self, x: u32) -> &[u32] {
        &self.keys[x as usize]
    }

    pub fn gen_ids(&self) -> &[u32] {
        &self.gens
    }

    pub fn by_label(&self, label: &str) -> Option<u32> {
        self.spec.labels.iter().position(|l| l == label).map(|i| self.gens[i])
    }

    pub fn has_labels(&self, labels: &[&str]) -> bool {
        labels.iter().all(|l| self.by_label(l).is_some())
    }

    /// Image of a lamp letter (`U(1)`, `V(1)`, `V(2)`, or a tree letter).
    pub fn letter(&self, l: Letter) -> Result<u32> {
        self.by_label(&l.to_string())
            .ok_or_else(|| Error::invalid(format!("lamp group {} has no generator {l}", self.spec.name)))
    }

    pub fn eval(&self, w: &Word) -> Result<u32> {
        let mut acc = 0;
        for &l in w.letters() {
            acc = self.mul(acc, self.letter(l)?);
        }
        Ok(acc)
    }

    pub fn commutator(&self, x: u32, y: u32) -> u32 {
        let a = self.mul(self.inv(x), self.inv(y));
        self.mul(self.mul(a, x), y)
    }

    /// `u1` an involution; `v1`, `v2` commuting involutions.
    pub fn check_uv_marking(&self) -> Result<()> {
        let get = |l: &str| {
            self.by_label(l)
                .ok_or_else(|| Error::invalid(format!("lamp {} lacks generator {l}", self.spec.name)))
        };
        let (u, v1, v2) = (get("u1")?, get("v1")?, get("v2")?);
        for (name, x) in [("u1", u), ("v1", v1), ("v2", v2)] {
            if self.mul(x, x) != 0 {
                return Err(Error::invalid(format!("{name} is not an involution in {}", self.spec.name)));
            }
        }
        if self.mul(v1, v2) != self.mul(v2, v1) {
            return Err(Error::invalid(format!("v1 and v2 do not commute in {}", self.spec.name)));
        }
        Ok(())
    }

    /// Involutions `a, b, c, d` with `bc = d`.
    pub fn check_tree_marking(&self) -> Result<()> {
        let get = |l: &str| {
            self.by_label(l)
                .ok_or_else(|| Error::invalid(format!("lamp {} lacks generator {l}", self.spec.name)))
        };
        let (a, b, c, d) = (get("a")?, get("b")?, get("c")?, get("d")?);
        for x in [a, b, c, d] {
            if self.mul(x, x) != 0 {
                return Err(Error::invalid(format!("{} is not marked by involutions", self.spec.name)));
            }
        }
        if self.mul(b, c) != d || self.mul(c, b) != d {
            return Err(Error::invalid(format!("b, c, d do not form a Klein group in {}", self.spec.name)));
        }
        Ok(())
    }

    /// Growth sequence of the Cayley graph for the full marking; computed once.
    pub fn growth(&self) -> &GrowthProfile {
        self.growth.get_or_init(|| {
            full_growth(self, BallOptions::default()).expect("closure is already materialized")
        })
    }

    pub fn diameter(&self) -> usize {
        self.growth().radius()
    }

    pub fn metadata(&self) -> FiniteMetadata {
        FiniteMetadata {
            name: self.spec.name.clone(),
            order: self.order(),
            diameter: self.diameter(),
            growth: self.growth().counts.clone(),
        }
    }

    /// Shortest word in the marking generators (first-found in generator
    /// order) for every element.
    pub fn shortest_words(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut parent: Vec<Option<(u32, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        done[0] = true;
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for (i, &g) in self.gens.iter().enumerate() {
                let y = self.mul(x, g);
                if !done[y as usize] {
                    done[y as usize] = true;
                    parent[y as usize] = Some((x, i));
                    queue.push_back(y);
                }
            }
        }
        (0..n)
            .map(|x| {
                let mut w = Vec::new();
                let mut cur = x as u32;
                while let Some((p, i)) = parent[cur as usize] {
                    w.push(i);
                    cur = p;
                }
                w.reverse();
                w
            })
            .collect()
    }
}

impl MarkedGroup for FiniteGroup {
    type Elem = u32;

    fn labels(&self) -> Vec<String> {
        self.spec.labels.clone()
    }
    fn identity(&self) -> u32 {
        0
    }
    fn generator(&self, i: usize) -> u32 {
        self.gens[i]
    }
    fn multiply(&self, x: &u32, y: &u32) -> u32 {
        self.mul(*x, *y)
    }
    fn inverse(&self, x: &u32) -> u32 {
        self.inv(*x)
    }
}

fn identity_key(kind: &FiniteKind) -> Vec<u32> {
    match kind {
        FiniteKind::Matrix { dim, .. } => {
            (0..dim * dim).map(|i| u32::from(i / dim == i % dim)).collect()
        }
        FiniteKind::Perm { degree, .. } => (0..*degree as u32).collect(),
        FiniteKind::Table { .. } => vec![0],
    }
}

fn normalize(kind: &FiniteKind, m: Vec<u32>) -> Vec<u32> {
    match kind {
        FiniteKind::Matrix { modulus, projective: true, .. } => {
            let neg: Vec<u32> = m.iter().map(|&x| (modulus - x) % modulus).collect();
            m.min(neg)
        }
        _ => m,
    }
}

fn key_mul(kind: &FiniteKind, x: &[u32], y: &[u32]) -> Vec<u32> {
    match kind {
        FiniteKind::Matrix { dim, modulus, .. } => {
            let (d, m) = (*dim, *modulus as u64);
            let mut out = vec![0u32; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0u64;
                    for k in 0..d {
                        s += x[i * d + k] as u64 * y[k * d + j] as u64;
                    }
                    out[i * d + j] = (s % m) as u32;
                }
            }
            normalize(kind, out)
        }
        FiniteKind::Perm { .. } => perm_mul(x, y),
        FiniteKind::Table { table, .. } => vec![table[x[0] as usize][y[0] as usize]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psl2_mod5_has_order_60() {
        let g = FiniteGroup::new(psl2_lamp(5).unwrap()).unwrap();
        assert_eq!(g.order(), 60);
        g.check_uv_marking().unwrap();
        assert!(g.diameter() >= 3);
    }

    #[test]
    fn psl2_mod25_has_order_7500() {
        let g = FiniteGroup::new(psl2_lamp(25).unwrap()).unwrap();
        assert_eq!(g.order(), 25 * 25 * 25 * 24 / 25 / 2);
        g.check_uv_marking().unwrap();
    }

    #[test]
    fn z2_and_klein() {
        let z2 = FiniteGroup::new(z2_lamp()).unwrap();
        assert_eq!((z2.order(), z2.diameter()), (2, 1));
        assert_eq!(z2.growth().counts, vec![1, 2]);
        let k = FiniteGroup::new(klein_lamp()).unwrap();
        assert_eq!((k.order(), k.diameter()), (4, 1));
        k.check_uv_marking().unwrap();
        let two_gen = FiniteGroupSpec {
            name: "klein2".into(),
            labels: vec!["x".into(), "y".into()],
            kind: FiniteKind::Perm { degree: 4, gens: vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]] },
        };
        let k2 = FiniteGroup::new(two_gen).unwrap();
        assert_eq!((k2.order(), k2.diameter()), (4, 2));
    }

    #[test]
    fn dihedral_lamps() {
        let d = FiniteGroup::new(dihedral_lamp(8).unwrap()).unwrap();
        assert_eq!(d.order(), 16);
        d.check_uv_marking().unwrap();
        let c = d.commutator(d.by_label("u1").unwrap(), d.by_label("v1").unwrap());
        assert_ne!(c, 0);
        let t = FiniteGroup::new(dihedral_tree_lamp(16).unwrap()).unwrap();
        assert_eq!(t.order(), 32);
        t.check_tree_marking().unwrap();
        let w: Word = "bc".parse().unwrap();
        assert_eq!(t.eval(&w).unwrap(), t.by_label("d").unwrap());
    }

    #[test]
    fn table_from_config() {
        let c = KvConfig::parse("kind = table\nrow.0 = 0 1\nrow.1 = 1 0\ngen.u1 = 1\ngen.v1 = 1\ngen.v2 = 0\n").unwrap();
        let g = FiniteGroup::new(FiniteGroupSpec::from_config(&c).unwrap()).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(FiniteGroupSpec::from_config(&KvConfig::parse("lamp = klein").unwrap()).unwrap(), klein_lamp());
        let m = KvConfig::parse("kind = matrix\nmodulus = 5\nprojective = true\ngen.u1 = 1 1 ; 3 4\ngen.v1 = 0 1 ; -1 0\ngen.v2 = 0 2 ; 2 0").unwrap();
        assert_eq!(FiniteGroup::new(FiniteGroupSpec::from_config(&m).unwrap()).unwrap().order(), 60);
    }

    #[test]
    fn budget_and_validation() {
        assert!(matches!(
            FiniteGroup::with_budget(psl2_lamp(25).unwrap(), 100),
            Err(Error::Budget { .. })
        ));
        let bad = FiniteGroupSpec {
            name: "bad".into(),
            labels: vec!["x".into()],
            kind: FiniteKind::Perm { degree: 2, gens: vec![vec![0, 0]] },
        };
        assert!(FiniteGroup::new(bad).is_err());
        assert!(library("nonsense").is_err());
    }

    #[test]
    fn shortest_words_evaluate_back() {
        let g = FiniteGroup::new(psl2_lamp(5).unwrap()).unwrap();
        let words = g.shortest_words();
        for (x, w) in words.iter().enumerate() {
            assert_eq!(g.eval_indices(w), x as u32);
        }
        assert_eq!(words.iter().map(Vec::len).max().unwrap(), g.diameter());
    }
}
