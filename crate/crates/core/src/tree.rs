//! Colored derivation trees and certificates.
//!
//! Every non-terminal occurrence in a derivation carries a color. Swaps keep
//! colors; a production step retires the color of the fired occurrence and
//! mints fresh colors for its right-hand side. The retired color is the
//! parent of the fresh ones. A certificate pairs the induced tree with the
//! color fired at each word position.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Derivation, Step};
use crate::grammar::{Grammar, LetterId, Nt, ProdId};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeNode {
    pub id: ColorId,
    pub label: Nt,
    pub production: ProdId,
    pub children: Vec<ColorId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {0} is listed twice")]
    DuplicateNode(u32),
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("node {node}: production does not rewrite its label")]
    LabelMismatch { node: u32 },
    #[error("node {node}: children do not match the production's right-hand side")]
    ChildrenMismatch { node: u32 },
    #[error("node {0} has more than one parent or is the root's child")]
    SharedChild(u32),
    #[error("node {0} is not reachable from the root")]
    Unreachable(u32),
    #[error("no production #{0}")]
    UnknownProduction(usize),
    #[error("unknown non-terminal `{0}`")]
    UnknownLabel(String),
    #[error("derivation step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("replacement is rooted at {found}, expected {expected}")]
    RootMismatch { expected: String, found: String },
    #[error("malformed certificate: {0}")]
    Format(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationTree {
    root: ColorId,
    nodes: BTreeMap<ColorId, TreeNode>,
}

impl DerivationTree {
    /// Builds a tree, rejecting anything that is not a tree or whose
    /// children disagree with the production at a node.
    pub fn from_nodes(g: &Grammar, root: ColorId, nodes: Vec<TreeNode>) -> Result<Self, TreeError> {
        let mut map = BTreeMap::new();
        for n in nodes {
            if n.production.0 >= g.productions().len() {
                return Err(TreeError::UnknownProduction(n.production.0));
            }
            let p = g.production(n.production);
            if p.lhs != n.label {
                return Err(TreeError::LabelMismatch { node: n.id.0 });
            }
            if n.children.len() != p.rhs.len() {
                return Err(TreeError::ChildrenMismatch { node: n.id.0 });
            }
            let id = n.id;
            if map.insert(id, n).is_some() {
                return Err(TreeError::DuplicateNode(id.0));
            }
        }
        if !map.contains_key(&root) {
            return Err(TreeError::UnknownNode(root.0));
        }
        let mut parent_seen = BTreeSet::from([root]);
        for n in map.values() {
            let p = g.production(n.production);
            for (c, &want) in n.children.iter().zip(&p.rhs) {
                let child = map.get(c).ok_or(TreeError::UnknownNode(c.0))?;
                if child.label != want {
                    return Err(TreeError::ChildrenMismatch { node: n.id.0 });
                }
                if !parent_seen.insert(*c) {
                    return Err(TreeError::SharedChild(c.0));
                }
            }
        }
        // Every node but the root has exactly one parent, so the node set is
        // a tree exactly when everything is reachable from the root.
        let tree = DerivationTree { root, nodes: map };
        let reachable: BTreeSet<ColorId> = tree.subtree(root).into_iter().collect();
        if let Some(lost) = tree.nodes.keys().find(|id| !reachable.contains(id)) {
            return Err(TreeError::Unreachable(lost.0));
        }
        Ok(tree)
    }

    pub fn root(&self) -> ColorId {
        self.root
    }

    pub fn node(&self, id: ColorId) -> Option<&TreeNode> {
        self.nodes.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_label(&self) -> Nt {
        self.nodes[&self.root].label
    }

    /// Colors in the subtree rooted at `id`, in preorder.
    pub fn subtree(&self, id: ColorId) -> Vec<ColorId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if let Some(n) = self.nodes.get(&c) {
                out.push(c);
                stack.extend(n.children.iter().rev());
            }
        }
        out
    }

    /// The subtree rooted at `id` as a tree of its own, colors unchanged.
    pub fn clone_subtree(&self, id: ColorId) -> DerivationTree {
        let nodes = self.subtree(id).into_iter().map(|c| (c, self.nodes[&c].clone())).collect();
        DerivationTree { root: id, nodes }
    }

    /// Renders one node per line as `id : X -a-> Y Z`, indented by depth.
    pub fn format(&self, g: &Grammar) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((c, depth)) = stack.pop() {
            let n = &self.nodes[&c];
            out.push_str(&format!("{}{} : {}\n", "  ".repeat(depth), c.0, g.format_production(n.production)));
            stack.extend(n.children.iter().rev().map(|&k| (k, depth + 1)));
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub tree: DerivationTree,
    /// The color fired at each word position.
    pub order: Vec<ColorId>,
}

impl Certificate {
    pub fn new(tree: DerivationTree, order: Vec<ColorId>) -> Self {
        Certificate { tree, order }
    }

    /// The word spelled by firing the nodes in order.
    pub fn spelled(&self, g: &Grammar) -> Option<Word> {
        self.order
            .iter()
            .map(|c| self.tree.node(*c).map(|n| g.letter(g.production(n.production).letter).clone()))
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("word has {word} letters but the certificate has {nodes} nodes and {order} positions")]
    LengthMismatch { word: usize, nodes: usize, order: usize },
    #[error("unknown node {0}")]
    UnknownNode(u32),
}

/// Replays a derivation with the coloring discipline. Colors are numbered
/// from 1 in order of appearance.
pub fn tree_from_derivation(g: &Grammar, d: &Derivation) -> Result<Certificate, TreeError> {
    let invalid = |step: usize, reason: &str| TreeError::InvalidStep { step, reason: reason.to_string() };
    if d.start.len() != 1 {
        return Err(invalid(0, "a tree needs a single initial non-terminal"));
    }
    let mut next_color = 1u32;
    let mut live: Vec<(Nt, ColorId)> = vec![(d.start[0], ColorId(next_color))];
    next_color += 1;
    let mut nodes = Vec::new();
    let mut order = Vec::new();
    for (i, step) in d.steps.iter().enumerate() {
        match *step {
            Step::Swap(k) => {
                if k + 1 >= live.len() {
                    return Err(invalid(i, "swap index out of range"));
                }
                if !g.independent(live[k].0, live[k + 1].0) {
                    return Err(invalid(i, "swap of dependent non-terminals"));
                }
                live.swap(k, k + 1);
            }
            Step::Produce(pid) => {
                if pid.0 >= g.productions().len() {
                    return Err(invalid(i, "unknown production"));
                }
                let p = g.production(pid);
                let Some(&(head, color)) = live.first() else {
                    return Err(invalid(i, "empty configuration"));
                };
                if head != p.lhs {
                    return Err(invalid(i, "production does not rewrite the head"));
                }
                let fresh: Vec<(Nt, ColorId)> = p
                    .rhs
                    .iter()
                    .map(|&nt| {
                        let c = ColorId(next_color);
                        next_color += 1;
                        (nt, c)
                    })
                    .collect();
                nodes.push(TreeNode {
                    id: color,
                    label: head,
                    production: pid,
                    children: fresh.iter().map(|f| f.1).collect(),
                });
                order.push(color);
                live.splice(0..1, fresh);
            }
        }
    }
    if !live.is_empty() {
        return Err(invalid(d.steps.len(), "derivation does not end in the empty configuration"));
    }
    let root = ColorId(1);
    Ok(Certificate { tree: DerivationTree::from_nodes(g, root, nodes)?, order })
}

/// Polynomial check that the certificate's firing order is realizable and
/// spells `word` from the start symbol.
pub fn verify_certificate(g: &Grammar, word: &[Letter], cert: &Certificate) -> Result<bool, CertError> {
    if word.len() != cert.tree.len() || word.len() != cert.order.len() {
        return Err(CertError::LengthMismatch { word: word.len(), nodes: cert.tree.len(), order: cert.order.len() });
    }
    if cert.tree.root_label() != g.start() {
        return Ok(false);
    }
    let Ok(ids) = g.encode(word) else {
        return Ok(false);
    };
    Ok(simulate(g, &cert.tree, &cert.order, Some(&ids)))
}

/// Fires `order` from the root. Each fired color must be live, preceded
/// only by colors independent of it, and (if given) emit the next letter.
fn simulate(g: &Grammar, tree: &DerivationTree, order: &[ColorId], word: Option<&[LetterId]>) -> bool {
    let mut live = vec![tree.root];
    for (i, c) in order.iter().enumerate() {
        let Some(pos) = live.iter().position(|x| x == c) else {
            return false;
        };
        let node = &tree.nodes[c];
        if !live[..pos].iter().all(|x| g.independent(tree.nodes[x].label, node.label)) {
            return false;
        }
        if word.is_some_and(|w| g.production(node.production).letter != w[i]) {
            return false;
        }
        live.splice(pos..pos + 1, []);
        live.splice(0..0, node.children.iter().copied());
    }
    live.is_empty()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeWords {
    pub words: BTreeSet<Word>,
    /// True when the limit cut the enumeration short.
    pub truncated: bool,
}

/// Every word some valid firing order of `tree` spells, up to `limit` words.
pub fn words_of_tree(g: &Grammar, tree: &DerivationTree, limit: usize) -> TreeWords {
    struct Search<'a> {
        g: &'a Grammar,
        tree: &'a DerivationTree,
        memo: HashMap<Vec<ColorId>, BTreeSet<Vec<LetterId>>>,
        limit: usize,
        truncated: bool,
    }
    impl Search<'_> {
        fn label(&self, c: ColorId) -> Nt {
            self.tree.nodes[&c].label
        }

        fn independent(&self, a: ColorId, b: ColorId) -> bool {
            a != b && self.g.independent(self.label(a), self.label(b))
        }

        // Least color among minimal occurrences, repeatedly.
        fn canonical(&self, live: &[ColorId]) -> Vec<ColorId> {
            let mut rest = live.to_vec();
            let mut out = Vec::with_capacity(rest.len());
            while !rest.is_empty() {
                let best = (0..rest.len())
                    .filter(|&i| rest[..i].iter().all(|&y| self.independent(y, rest[i])))
                    .min_by_key(|&i| rest[i])
                    .expect("the first occurrence is minimal");
                out.push(rest.remove(best));
            }
            out
        }

        fn run(&mut self, live: Vec<ColorId>) -> BTreeSet<Vec<LetterId>> {
            if live.is_empty() {
                return BTreeSet::from([Vec::new()]);
            }
            if let Some(hit) = self.memo.get(&live) {
                return hit.clone();
            }
            let mut out = BTreeSet::new();
            for i in 0..live.len() {
                if !live[..i].iter().all(|&y| self.independent(y, live[i])) {
                    continue;
                }
                let node = &self.tree.nodes[&live[i]];
                let letter = self.g.production(node.production).letter;
                let mut next = node.children.clone();
                next.extend(live.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c));
                let next = self.canonical(&next);
                for suffix in self.run(next) {
                    if out.len() >= self.limit {
                        self.truncated = true;
                        break;
                    }
                    let mut w = Vec::with_capacity(suffix.len() + 1);
                    w.push(letter);
                    w.extend(suffix);
                    out.insert(w);
                }
            }
            self.memo.insert(live, out.clone());
            out
        }
    }
    let mut s = Search { g, tree, memo: HashMap::new(), limit: limit.max(1), truncated: false };
    let words = s.run(vec![tree.root]);
    TreeWords { words: words.iter().map(|w| g.decode(w)).collect(), truncated: s.truncated }
}

/// Letters of `word` whose colors lie in the subtree rooted at `node`.
pub fn induced_subword(word: &[Letter], cert: &Certificate, node: ColorId) -> Result<Word, CertError> {
    Ok(induced_positions(cert, node)?.into_iter().map(|i| word[i].clone()).collect())
}

fn induced_positions(cert: &Certificate, node: ColorId) -> Result<Vec<usize>, CertError> {
    if cert.tree.node(node).is_none() {
        return Err(CertError::UnknownNode(node.0));
    }
    let sub: BTreeSet<ColorId> = cert.tree.subtree(node).into_iter().collect();
    Ok((0..cert.order.len()).filter(|&i| sub.contains(&cert.order[i])).collect())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Infix {
    pub u1: Word,
    pub v: Word,
    pub u2: Word,
    /// Certificate for `u1 v u2` with the same tree.
    pub certificate: Certificate,
}

impl Infix {
    pub fn word(&self) -> Word {
        self.u1.iter().chain(&self.v).chain(&self.u2).cloned().collect()
    }
}

/// Moves the subword induced by `node` into a contiguous infix starting at
/// its first letter.
pub fn rearrange_to_infix(word: &[Letter], cert: &Certificate, node: ColorId) -> Result<Infix, CertError> {
    let positions = induced_positions(cert, node)?;
    let first = positions.first().copied().unwrap_or(word.len());
    let inside: BTreeSet<usize> = positions.iter().copied().collect();
    let after: Vec<usize> = (first..word.len()).filter(|i| !inside.contains(i)).collect();
    let pick = |idx: &[usize]| -> Word { idx.iter().map(|&i| word[i].clone()).collect() };
    let mut order: Vec<ColorId> = cert.order[..first].to_vec();
    order.extend(positions.iter().map(|&i| cert.order[i]));
    order.extend(after.iter().map(|&i| cert.order[i]));
    Ok(Infix {
        u1: word[..first].to_vec(),
        v: pick(&positions),
        u2: pick(&after),
        certificate: Certificate { tree: cert.tree.clone(), order },
    })
}

/// Replaces the subtree at `node` by `replacement`. Colors outside the
/// subtree are kept; the replacement root takes `node`'s color, and the
/// other replacement nodes reuse the freed colors in ascending order before
/// fresh ones are minted.
pub fn substitute(
    g: &Grammar,
    tree: &DerivationTree,
    node: ColorId,
    replacement: &DerivationTree,
) -> Result<DerivationTree, TreeError> {
    let target = tree.node(node).ok_or(TreeError::UnknownNode(node.0))?;
    if target.label != replacement.root_label() {
        return Err(TreeError::RootMismatch {
            expected: g.name(target.label).to_string(),
            found: g.name(replacement.root_label()).to_string(),
        });
    }
    let removed: BTreeSet<ColorId> = tree.subtree(node).into_iter().collect();
    let mut free: Vec<ColorId> = removed.iter().copied().filter(|&c| c != node).collect();
    free.reverse();
    let mut fresh = tree.nodes.keys().map(|c| c.0).max().unwrap_or(0) + 1;
    let mut rename = BTreeMap::from([(replacement.root, node)]);
    for &id in replacement.nodes.keys() {
        if id == replacement.root {
            continue;
        }
        let new_id = free.pop().unwrap_or_else(|| {
            fresh += 1;
            ColorId(fresh - 1)
        });
        rename.insert(id, new_id);
    }
    let mut nodes: Vec<TreeNode> = tree.nodes.values().filter(|n| !removed.contains(&n.id)).cloned().collect();
    nodes.extend(replacement.nodes.values().map(|n| TreeNode {
        id: rename[&n.id],
        label: n.label,
        production: n.production,
        children: n.children.iter().map(|c| rename[c]).collect(),
    }));
    DerivationTree::from_nodes(g, tree.root, nodes)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: u32,
    pub label: String,
    /// Zero-based index into the grammar's productions in file order.
    pub production: usize,
    pub children: Vec<u32>,
}

/// Exchange form of a certificate.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub word: Vec<Letter>,
    pub root: u32,
    pub nodes: Vec<NodeDoc>,
    pub order: Vec<u32>,
}

impl CertificateDoc {
    pub fn from_certificate(g: &Grammar, word: &[Letter], cert: &Certificate) -> Self {
        CertificateDoc {
            word: word.to_vec(),
            root: cert.tree.root.0,
            nodes: cert
                .tree
                .nodes()
                .map(|n| NodeDoc {
                    id: n.id.0,
                    label: g.name(n.label).to_string(),
                    production: n.production.0,
                    children: n.children.iter().map(|c| c.0).collect(),
                })
                .collect(),
            order: cert.order.iter().map(|c| c.0).collect(),
        }
    }

    pub fn to_certificate(&self, g: &Grammar) -> Result<(Word, Certificate), TreeError> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let label = g.nt(&n.label).ok_or_else(|| TreeError::UnknownLabel(n.label.clone()))?;
                Ok(TreeNode {
                    id: ColorId(n.id),
                    label,
                    production: ProdId(n.production),
                    children: n.children.iter().map(|&c| ColorId(c)).collect(),
                })
            })
            .collect::<Result<Vec<_>, TreeError>>()?;
        let tree = DerivationTree::from_nodes(g, ColorId(self.root), nodes)?;
        let order = self.order.iter().map(|&c| ColorId(c)).collect();
        Ok((self.word.clone(), Certificate { tree, order }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        serde_json::from_str(text).map_err(|e| TreeError::Format(e.to_string()))
    }
}
