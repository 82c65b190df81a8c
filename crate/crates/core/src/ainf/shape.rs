use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graded::{GradedBasis, GradingMode, VectorB};

/// Basis element `idx` of `Hom(src, tgt)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Gen {
    pub src: u32,
    pub tgt: u32,
    pub idx: u32,
}

impl Gen {
    pub fn new(src: usize, tgt: usize, idx: usize) -> Self {
        Gen { src: src as u32, tgt: tgt as u32, idx: idx as u32 }
    }

    pub fn src(&self) -> usize {
        self.src as usize
    }

    pub fn tgt(&self) -> usize {
        self.tgt as usize
    }

    pub fn idx(&self) -> usize {
        self.idx as usize
    }
}

/// An element of `B ⊗ Hom(src, tgt)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    pub src: usize,
    pub tgt: usize,
    pub value: VectorB,
}

impl Morphism {
    pub fn new(src: usize, tgt: usize, value: VectorB) -> Self {
        Morphism { src, tgt, value }
    }

    pub fn basis(g: Gen) -> Self {
        Morphism { src: g.src(), tgt: g.tgt(), value: VectorB::unit(g.idx()) }
    }
}

/// Objects, graded hom bases and identities of a finite category.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Shape {
    objects: Vec<String>,
    mode: GradingMode,
    homs: Vec<GradedBasis>,
    identities: Vec<Option<usize>>,
}

impl Shape {
    /// Hom spaces not listed are zero. Identities must have degree 0.
    pub fn new(
        mode: GradingMode,
        objects: Vec<String>,
        homs: BTreeMap<(usize, usize), GradedBasis>,
        identities: Vec<Option<usize>>,
    ) -> Result<Self> {
        let n = objects.len();
        if identities.len() != n {
            return Err(Error::Invalid("one identity entry per object is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &objects {
            if !seen.insert(o) {
                return Err(Error::Invalid(format!("duplicate object {o}")));
            }
        }
        let mut table = vec![GradedBasis::empty(mode); n * n];
        for ((s, t), b) in homs {
            if s >= n || t >= n {
                return Err(Error::Invalid("hom space refers to an unknown object".into()));
            }
            if b.mode() != mode {
                return Err(Error::Invalid("grading modes differ".into()));
            }
            table[s * n + t] = b;
        }
        for (x, id) in identities.iter().enumerate() {
            if let Some(i) = id {
                let b = &table[x * n + x];
                if *i >= b.dim() {
                    return Err(Error::Invalid(format!("identity of {} out of range", objects[x])));
                }
                if b.degree(*i) != 0 {
                    return Err(Error::DegreeMismatch(format!("identity of {} must have degree 0", objects[x])));
                }
            }
        }
        Ok(Shape { objects, mode, homs: table, identities })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    pub fn hom(&self, src: usize, tgt: usize) -> &GradedBasis {
        &self.homs[src * self.objects.len() + tgt]
    }

    pub fn dim(&self, src: usize, tgt: usize) -> usize {
        self.hom(src, tgt).dim()
    }

    pub fn identity(&self, x: usize) -> Option<usize> {
        self.identities[x]
    }

    pub fn identity_gen(&self, x: usize) -> Option<Gen> {
        self.identities[x].map(|i| Gen::new(x, x, i))
    }

    pub fn is_identity(&self, g: Gen) -> bool {
        g.src == g.tgt && self.identities[g.src()] == Some(g.idx())
    }

    pub fn degree(&self, g: Gen) -> i64 {
        self.hom(g.src(), g.tgt()).degree(g.idx())
    }

    /// `‖a‖ = |a| - 1`.
    pub fn reduced(&self, g: Gen) -> i64 {
        self.degree(g) - 1
    }

    pub fn gen_name(&self, g: Gen) -> &str {
        self.hom(g.src(), g.tgt()).name(g.idx())
    }

    pub fn gens(&self, src: usize, tgt: usize) -> impl Iterator<Item = Gen> + '_ {
        (0..self.dim(src, tgt)).map(move |i| Gen::new(src, tgt, i))
    }

    pub fn all_gens(&self) -> Vec<Gen> {
        let n = self.num_objects();
        let mut out = Vec::new();
        for s in 0..n {
            for t in 0..n {
                out.extend(self.gens(s, t));
            }
        }
        out
    }

    /// Index pairs `(src, tgt)` with nonzero hom space.
    pub fn hom_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_objects();
        let mut out = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if self.dim(s, t) > 0 {
                    out.push((s, t));
                }
            }
        }
        out
    }

    /// All composable tuples of length `len` in path order (first element is applied first).
    pub fn tuples(&self, len: usize) -> Vec<Vec<Gen>> {
        let mut out = Vec::new();
        if len == 0 {
            return out;
        }
        let n = self.num_objects();
        let mut cur = Vec::with_capacity(len);
        fn rec(shape: &Shape, n: usize, len: usize, from: usize, cur: &mut Vec<Gen>, out: &mut Vec<Vec<Gen>>) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for t in 0..n {
                for g in shape.gens(from, t) {
                    cur.push(g);
                    rec(shape, n, len, t, cur, out);
                    cur.pop();
                }
            }
        }
        for s in 0..n {
            rec(self, n, len, s, &mut cur, &mut out);
        }
        out
    }

    pub fn check_composable(&self, tuple: &[Gen]) -> Result<()> {
        for w in tuple.windows(2) {
            if w[0].tgt != w[1].src {
                return Err(Error::NotComposable(self.format_tuple(tuple)));
            }
        }
        Ok(())
    }

    /// Tuple in written order `a_k, ..., a_1`.
    pub fn format_tuple(&self, tuple: &[Gen]) -> String {
        let names: Vec<&str> = tuple.iter().rev().map(|&g| self.gen_name(g)).collect();
        format!("({})", names.join(", "))
    }

    pub fn format_vector(&self, src: usize, tgt: usize, v: &VectorB) -> String {
        v.format_with(self.hom(src, tgt))
    }

    /// Objects along a path: `src(a_1), tgt(a_1), ..., tgt(a_k)`.
    pub fn path_objects(tuple: &[Gen], start: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(tuple.len() + 1);
        out.push(tuple.first().map_or(start, |g| g.src()));
        out.extend(tuple.iter().map(|g| g.tgt()));
        out
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, t) in self.hom_pairs() {
            let b = self.hom(s, t);
            let els: Vec<String> = b.elements().iter().map(|e| format!("{}:{}", e.name, e.degree)).collect();
            writeln!(f, "Hom({}, {}) = [{}]", self.objects[s], self.objects[t], els.join(", "))?;
        }
        Ok(())
    }
}
