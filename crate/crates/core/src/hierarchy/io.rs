//! Binary hierarchy files.
//!
//! Layout (little endian): magic `SEPNNHIE`, format version, base-case size,
//! strategy name, the graph (directed flag, CSR arrays, optional
//! coordinates), then one record per hierarchy node in pre-order: global
//! node ids, separator, children, base flag and distance tables. Sorted
//! separator lists, child maps, leaf adjacency and locate chains are derived
//! on load.

use std::io::{Read, Write};

use super::{sort_separators, HNodeId, Hierarchy, HierarchyNode};
use crate::error::{Error, Result};
use crate::graph::{Csr, Graph, Point, SubgraphView, NONE};

pub const MAGIC: &[u8; 8] = b"SEPNNHIE";
pub const VERSION: u32 = 1;

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn u8(&mut self, x: u8) -> Result<()> {
        Ok(self.0.write_all(&[x])?)
    }

    fn u32(&mut self, x: u32) -> Result<()> {
        Ok(self.0.write_all(&x.to_le_bytes())?)
    }

    fn u64(&mut self, x: u64) -> Result<()> {
        Ok(self.0.write_all(&x.to_le_bytes())?)
    }

    fn str(&mut self, s: &str) -> Result<()> {
        self.u64(s.len() as u64)?;
        Ok(self.0.write_all(s.as_bytes())?)
    }

    fn u32s(&mut self, xs: &[u32]) -> Result<()> {
        self.u64(xs.len() as u64)?;
        let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
        Ok(self.0.write_all(&bytes)?)
    }

    fn f64s(&mut self, xs: &[f64]) -> Result<()> {
        self.u64(xs.len() as u64)?;
        for chunk in xs.chunks(1 << 16) {
            let bytes: Vec<u8> = chunk.iter().flat_map(|x| x.to_le_bytes()).collect();
            self.0.write_all(&bytes)?;
        }
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b).map_err(truncated)?;
        Ok(b)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn len(&mut self, elem: usize) -> Result<usize> {
        let n = self.u64()?;
        if n > (1u64 << 40) / elem as u64 {
            return Err(Error::Format(format!("array length {n} out of range")));
        }
        Ok(n as usize)
    }

    /// Reads exactly `n` bytes, growing the buffer as data arrives so that a
    /// corrupt length cannot trigger a huge allocation.
    fn raw(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        (&mut self.0).take(n as u64).read_to_end(&mut buf)?;
        if buf.len() != n {
            return Err(bad("unexpected end of file"));
        }
        Ok(buf)
    }

    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        String::from_utf8(self.raw(n)?).map_err(|_| bad("strategy name is not UTF-8"))
    }

    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.len(4)?;
        Ok(self
            .raw(n * 4)?
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        Ok(self
            .raw(n * 8)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("unexpected end of file".into())
    } else {
        Error::Io(e)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

impl Hierarchy {
    /// Writes the hierarchy, including its graph.
    pub fn write_to(&self, w: impl Write) -> Result<()> {
        let mut w = Writer(w);
        w.0.write_all(MAGIC)?;
        w.u32(VERSION)?;
        w.u64(self.base_case_size as u64)?;
        w.str(&self.strategy)?;

        let g = &self.graph;
        w.u8(g.is_directed() as u8)?;
        let (offsets, targets, weights) = g.out_adjacency().parts();
        w.u32s(offsets)?;
        w.u32s(targets)?;
        w.f64s(weights)?;
        match g.coords() {
            Some(c) => {
                w.u8(1)?;
                w.f64s(&c.iter().flat_map(|p| [p.x, p.y]).collect::<Vec<_>>())?;
            }
            None => w.u8(0)?,
        }

        w.u64(self.nodes.len() as u64)?;
        for h in &self.nodes {
            w.u32s(&h.nodes)?;
            w.u32s(&h.separator)?;
            w.u32s(&h.children)?;
            w.u8(h.is_base() as u8)?;
            w.u32(h.level)?;
            w.f64s(&h.dist_from)?;
            match &h.dist_to {
                Some(d) => {
                    w.u8(1)?;
                    w.f64s(d)?;
                }
                None => w.u8(0)?,
            }
        }
        w.0.flush()?;
        Ok(())
    }

    /// Reads a hierarchy written by [`Hierarchy::write_to`].
    pub fn read_from(r: impl Read) -> Result<Hierarchy> {
        let mut r = Reader(r);
        if &r.bytes::<8>()? != MAGIC {
            return Err(bad("not a hierarchy file"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let base_case_size = r.u64()? as usize;
        let strategy = r.str()?;

        let directed = r.u8()? != 0;
        let offsets = r.u32s()?;
        let targets = r.u32s()?;
        let weights = r.f64s()?;
        if offsets.is_empty()
            || offsets[0] != 0
            || offsets.windows(2).any(|w| w[0] > w[1])
            || *offsets.last().unwrap() as usize != targets.len()
            || targets.len() != weights.len()
        {
            return Err(bad("inconsistent adjacency arrays"));
        }
        let n = offsets.len() - 1;
        if targets.iter().any(|&t| t as usize >= n) {
            return Err(bad("arc target out of range"));
        }
        let coords = match r.u8()? {
            0 => None,
            _ => {
                let flat = r.f64s()?;
                Some(
                    flat.chunks_exact(2)
                        .map(|c| Point::new(c[0], c[1]))
                        .collect(),
                )
            }
        };
        let graph = Graph::from_csr(directed, Csr::from_parts(offsets, targets, weights), coords)
            .map_err(|e| bad(format!("graph: {e}")))?;

        let count = r.u64()? as usize;
        if count == 0 || count > n.max(1) * 2 + 1 {
            return Err(bad(format!("implausible hierarchy node count {count}")));
        }
        let mut nodes = Vec::with_capacity(count);
        for id in 0..count {
            let members = r.u32s()?;
            let separator = r.u32s()?;
            let children = r.u32s()?;
            let is_base = r.u8()? != 0;
            let level = r.u32()?;
            let dist_from = r.f64s()?;
            let dist_to = match r.u8()? {
                0 => None,
                _ => Some(r.f64s()?),
            };
            let k = members.len();
            let s = separator.len();
            if members.windows(2).any(|w| w[0] >= w[1]) || members.iter().any(|&v| v as usize >= n)
            {
                return Err(bad(format!("node {id}: bad member list")));
            }
            if separator.iter().any(|&v| v as usize >= k)
                || separator.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(bad(format!("node {id}: bad separator")));
            }
            if children
                .iter()
                .any(|&c| c as usize <= id || c as usize >= count)
            {
                return Err(bad(format!("node {id}: bad child reference")));
            }
            if dist_from.len() != k * s || dist_to.as_ref().is_some_and(|d| d.len() != k * s) {
                return Err(bad(format!("node {id}: table size mismatch")));
            }
            if dist_to.is_some() != (directed && !is_base) {
                return Err(bad(format!("node {id}: directed tables mismatch")));
            }
            if is_base && (s > 0 || !children.is_empty()) {
                return Err(bad(format!(
                    "node {id}: base leaf with separator or children"
                )));
            }
            let sorted_seps = sort_separators(dist_to.as_ref().unwrap_or(&dist_from), k, s);
            let leaf = is_base.then(|| SubgraphView::induced(&graph, &members).into_out());
            nodes.push(HierarchyNode {
                nodes: members,
                separator,
                children,
                child_of: vec![NONE; k],
                dist_from,
                dist_to,
                sorted_seps,
                leaf,
                level,
            });
        }
        if nodes[0].nodes.len() != n {
            return Err(bad("root does not cover the graph"));
        }
        // child maps, checking that children partition the non-separator nodes
        for id in 0..count {
            let children: Vec<HNodeId> = nodes[id].children.clone();
            let mut child_of = vec![NONE; nodes[id].len()];
            for (c, &cid) in children.iter().enumerate() {
                for &v in &nodes[cid as usize].nodes {
                    let local = nodes[id]
                        .local_id(v)
                        .ok_or_else(|| bad(format!("node {id}: child holds foreign node {v}")))?;
                    if child_of[local as usize] != NONE {
                        return Err(bad(format!("node {id}: children overlap")));
                    }
                    child_of[local as usize] = c as u32;
                }
            }
            let h = &mut nodes[id];
            if h.separator.iter().any(|&s| child_of[s as usize] != NONE) {
                return Err(bad(format!("node {id}: separator node inside a child")));
            }
            let covered = child_of.iter().filter(|&&c| c != NONE).count() + h.separator.len();
            if !h.is_base() && covered != h.len() {
                return Err(bad(format!(
                    "node {id}: children and separator do not partition"
                )));
            }
            h.child_of = child_of;
        }
        Ok(Hierarchy::assemble(graph, nodes, base_case_size, strategy))
    }
}
