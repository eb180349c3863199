//! Case trees refuting a positive cone: every leaf names a relator that is a
//! product of letters assumed positive on its path, yet equals the identity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::appendix::AppendixGroup;
use super::WeeksError;

pub const TREE_ALPHABET: [char; 8] = ['g', 'h', 'n', 'd', 'c', 'm', 'v', 'f'];

const APPENDIX_TREE: &str = crate::data::APPENDIX_TREE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Leaf {
        leaf: String,
    },
    Branch {
        branch: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pos: Option<Box<Node>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neg: Option<Box<Node>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseTree {
    pub assume: String,
    pub node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeFailure {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relator: Option<String>,
    /// `structural`, `sign-misuse` or `non-identity`.
    pub code: &'static str,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeCertificate {
    /// `"pass"` or `"fail"`.
    pub verdict: &'static str,
    pub leaves: usize,
    pub checked_leaves: usize,
    pub failures: Vec<TreeFailure>,
    pub symmetry: String,
}

impl TreeCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

pub fn appendix_tree() -> CaseTree {
    serde_json::from_str(APPENDIX_TREE).expect("bundled tree parses")
}

fn parse_letter(s: &str) -> Option<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) if TREE_ALPHABET.contains(&c.to_ascii_lowercase()) => Some(c),
        _ => None,
    }
}

struct LeafJob {
    path: Vec<char>,
    word: String,
}

fn path_string(path: &[char]) -> String {
    path.iter().map(char::to_string).collect::<Vec<_>>().join(",")
}

fn walk(node: &Node, path: &mut Vec<char>, leaves: &mut Vec<LeafJob>, failures: &mut Vec<TreeFailure>) {
    let structural = |path: &[char], reason: String| TreeFailure {
        path: path_string(path),
        relator: None,
        code: "structural",
        reason,
    };
    match node {
        Node::Leaf { leaf } => {
            if leaf.is_empty() {
                failures.push(structural(path, "empty relator".into()));
            } else {
                leaves.push(LeafJob { path: path.clone(), word: leaf.clone() });
            }
        }
        Node::Branch { branch, pos, neg } => {
            let Some(c) = parse_letter(branch).filter(char::is_ascii_lowercase) else {
                failures.push(structural(path, format!("branch letter {branch:?} is not a lowercase tree letter")));
                return;
            };
            if path.iter().any(|p| p.to_ascii_lowercase() == c) {
                failures.push(structural(path, format!("letter {c} is already decided on this path")));
                return;
            }
            for (child, signed) in [(pos, c), (neg, c.to_ascii_uppercase())] {
                match child {
                    Some(n) => {
                        path.push(signed);
                        walk(n, path, leaves, failures);
                        path.pop();
                    }
                    None => failures.push(structural(path, format!("missing branch {signed}"))),
                }
            }
        }
    }
}

/// Checks structure, sign usage and the exact identity of every leaf relator.
pub fn verify_orderability_tree(g: &AppendixGroup, tree: &CaseTree) -> Result<TreeCertificate, WeeksError> {
    let mut failures = Vec::new();
    let mut leaves = Vec::new();
    match parse_letter(&tree.assume) {
        Some(root) => {
            let mut path = vec![root];
            walk(&tree.node, &mut path, &mut leaves, &mut failures);
        }
        None => failures.push(TreeFailure {
            path: String::new(),
            relator: None,
            code: "structural",
            reason: format!("root assumption {:?} is not a tree letter", tree.assume),
        }),
    }
    let leaf_results: Vec<Option<TreeFailure>> = leaves
        .par_iter()
        .map(|job| {
            let fail = |code, reason| Some(TreeFailure {
                path: path_string(&job.path),
                relator: Some(job.word.clone()),
                code,
                reason,
            });
            if let Some(bad) = job.word.chars().find(|c| !job.path.contains(c)) {
                return Ok(fail("sign-misuse", format!("letter {bad} is not assumed positive on this path")));
            }
            let v = g.eval(&job.word)?;
            if v.is_pm_one() {
                Ok(None)
            } else {
                Ok(fail("non-identity", "relator does not evaluate to ±1".into()))
            }
        })
        .collect::<Result<_, WeeksError>>()?;
    let checked_leaves = leaf_results.len();
    failures.extend(leaf_results.into_iter().flatten());
    Ok(TreeCertificate {
        verdict: if failures.is_empty() { "pass" } else { "fail" },
        leaves: leaves.len(),
        checked_leaves,
        failures,
        symmetry: format!(
            "root assumes {} positive without loss of generality: inverting every letter of a relator \
             that evaluates to ±1 gives another such relator, so the tree for the opposite sign is the mirror image",
            tree.assume
        ),
    })
}

fn visit_leaves(n: &mut Node, f: &mut dyn FnMut(&mut String)) {
    match n {
        Node::Leaf { leaf } => f(leaf),
        Node::Branch { pos, neg, .. } => {
            for c in [pos, neg].into_iter().flatten() {
                visit_leaves(c, f);
            }
        }
    }
}

/// Pre-order visit of branch nodes with their children.
fn visit_branches(n: &mut Node, f: &mut dyn FnMut(&mut Option<Box<Node>>, &mut Option<Box<Node>>)) {
    if let Node::Branch { pos, neg, .. } = n {
        f(pos, neg);
        for c in [pos, neg].into_iter().flatten() {
            visit_branches(c, f);
        }
    }
}

impl CaseTree {
    pub fn leaf_words(&self) -> Vec<String> {
        let mut out = Vec::new();
        visit_leaves(&mut self.node.clone(), &mut |w| out.push(w.clone()));
        out
    }

    pub fn branch_count(&self) -> usize {
        let mut k = 0;
        visit_branches(&mut self.node.clone(), &mut |_, _| k += 1);
        k
    }

    /// Copy with the case of one letter of one leaf relator flipped.
    pub fn with_flipped_letter(&self, leaf: usize, pos: usize) -> Option<CaseTree> {
        let mut t = self.clone();
        let (mut k, mut done) = (0, false);
        visit_leaves(&mut t.node, &mut |w| {
            if k == leaf && pos < w.chars().count() {
                *w = AppendixGroup::perturb(w, pos);
                done = true;
            }
            k += 1;
        });
        done.then_some(t)
    }

    /// Copy with one child of one branch node (pre-order index) removed.
    pub fn with_deleted_branch(&self, branch: usize, positive: bool) -> Option<CaseTree> {
        let mut t = self.clone();
        let (mut k, mut done) = (0, false);
        visit_branches(&mut t.node, &mut |p, n| {
            if k == branch {
                *(if positive { p } else { n }) = None;
                done = true;
            }
            k += 1;
        });
        done.then_some(t)
    }
}
