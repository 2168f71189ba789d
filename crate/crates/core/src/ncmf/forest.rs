use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassId, Dataset, DescriptorSample, NcmError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Classes compared at each node (k).
    pub classes_per_node: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 8,
            max_depth: 6,
            min_leaf: 1,
            classes_per_node: 3,
            seed: 0,
        }
    }
}

impl ForestParams {
    fn validate(&self) -> Result<(), NcmError> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_leaf == 0 {
            return Err(NcmError::InvalidParams(
                "n_trees, max_depth and min_leaf must be positive".into(),
            ));
        }
        if self.classes_per_node < 2 {
            return Err(NcmError::InvalidParams(
                "classes_per_node must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        descriptor_index: usize,
        /// Ascending by class id; `children[i]` belongs to `centroids[i]`.
        centroids: Vec<(ClassId, Vec<f64>)>,
        children: Vec<usize>,
    },
    Leaf {
        /// Indexed by class id, sums to 1.
        histogram: Vec<f64>,
        n_samples: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Arena; the root is node 0.
    nodes: Vec<Node>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the earlier (lower class id).
fn nearest(centroids: &[(ClassId, Vec<f64>)], v: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, (_, mu)) in centroids.iter().enumerate() {
        let d = squared_distance(mu, v);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

struct Builder<'a> {
    data: &'a Dataset,
    params: &'a ForestParams,
    n_classes: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let mut histogram = vec![0.0; self.n_classes];
        for &i in idx {
            histogram[self.data.label(i)] += 1.0;
        }
        let total = idx.len() as f64;
        histogram.iter_mut().for_each(|h| *h /= total);
        self.push(Node::Leaf {
            histogram,
            n_samples: idx.len(),
        })
    }

    fn one_hot(&mut self, class: ClassId) -> usize {
        let mut histogram = vec![0.0; self.n_classes];
        histogram[class] = 1.0;
        self.push(Node::Leaf {
            histogram,
            n_samples: 0,
        })
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let mut present: Vec<ClassId> = idx.iter().map(|&i| self.data.label(i)).collect();
        present.sort_unstable();
        present.dedup();
        if present.len() < 2
            || depth >= self.params.max_depth
            || idx.len() < 2 * self.params.min_leaf
        {
            return self.leaf(&idx);
        }

        let m = self.rng.random_range(0..self.data.dims().len());
        let k = self.params.classes_per_node.min(present.len());
        let mut chosen: Vec<ClassId> = sample_indices(&mut self.rng, present.len(), k)
            .into_iter()
            .map(|j| present[j])
            .collect();
        chosen.sort_unstable();

        let dim = self.data.dims()[m];
        let centroids: Vec<(ClassId, Vec<f64>)> = chosen
            .iter()
            .map(|&c| {
                let mut sum = vec![0.0; dim];
                let mut count = 0usize;
                for &i in idx.iter().filter(|&&i| self.data.label(i) == c) {
                    for (s, x) in sum.iter_mut().zip(&self.data.samples()[i].descriptors[m]) {
                        *s += x;
                    }
                    count += 1;
                }
                let mean = sum.into_iter().map(|s| s / count as f64).collect();
                (c, mean)
            })
            .collect();

        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); centroids.len()];
        for &i in &idx {
            parts[nearest(&centroids, &self.data.samples()[i].descriptors[m])].push(i);
        }
        if parts
            .iter()
            .any(|p| !p.is_empty() && p.len() < self.params.min_leaf)
        {
            return self.leaf(&idx);
        }

        // children are filled in after recursion
        let id = self.push(Node::Leaf {
            histogram: Vec::new(),
            n_samples: 0,
        });
        let children = parts
            .into_iter()
            .zip(&centroids)
            .map(|(part, &(class, _))| {
                if part.is_empty() {
                    self.one_hot(class)
                } else {
                    self.build(part, depth + 1)
                }
            })
            .collect();
        self.nodes[id] = Node::Split {
            descriptor_index: m,
            centroids,
            children,
        };
        id
    }
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    fn leaf_for(&self, sample: &DescriptorSample) -> &[f64] {
        let mut node = &self.nodes[0];
        loop {
            match node {
                Node::Leaf { histogram, .. } => return histogram,
                Node::Split {
                    descriptor_index,
                    centroids,
                    children,
                } => {
                    let i = nearest(centroids, &sample.descriptors[*descriptor_index]);
                    node = &self.nodes[children[i]];
                }
            }
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(t: &Tree, id: usize) -> usize {
            match &t.nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { children, .. } => {
                    1 + children.iter().map(|&c| go(t, c)).max().unwrap_or(0)
                }
            }
        }
        go(self, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<Tree>,
    n_classes: usize,
    dims: Vec<usize>,
}

/// Trains `params.n_trees` trees; tree `t` draws from its own stream seeded
/// with `params.seed + t`, so the result does not depend on scheduling.
pub fn train(dataset: &Dataset, params: &ForestParams) -> Result<Forest, NcmError> {
    params.validate()?;
    let classes = dataset.classes();
    if classes.len() < 2 {
        return Err(NcmError::DegenerateData(format!(
            "need at least 2 classes, found {}",
            classes.len()
        )));
    }
    let n_classes = classes[classes.len() - 1] + 1;
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut b = Builder {
                data: dataset,
                params,
                n_classes,
                rng: ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64)),
                nodes: Vec::new(),
            };
            b.build((0..dataset.len()).collect(), 0);
            Tree { nodes: b.nodes }
        })
        .collect();
    Ok(Forest {
        trees,
        n_classes,
        dims: dataset.dims().to_vec(),
    })
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Predicted class and the averaged posterior (indexed by class id).
    /// Ties go to the lowest class id.
    pub fn predict(&self, sample: &DescriptorSample) -> Result<(ClassId, Vec<f64>), NcmError> {
        sample.check_shape(&self.dims)?;
        let mut posterior = vec![0.0; self.n_classes];
        for tree in &self.trees {
            for (p, h) in posterior.iter_mut().zip(tree.leaf_for(sample)) {
                *p += h;
            }
        }
        let n = self.trees.len() as f64;
        posterior.iter_mut().for_each(|p| *p /= n);
        let mut best = 0;
        for (c, &p) in posterior.iter().enumerate() {
            if p > posterior[best] {
                best = c;
            }
        }
        Ok((best, posterior))
    }
}

/// Plain nearest-class-mean classifier over one descriptor, computed
/// directly from the dataset. Ties go to the lowest class id.
pub fn nearest_class_mean(
    dataset: &Dataset,
    sample: &DescriptorSample,
    descriptor_index: usize,
) -> ClassId {
    let mut sums: BTreeMap<ClassId, (Vec<f64>, usize)> = BTreeMap::new();
    for s in dataset.samples() {
        let v = &s.descriptors[descriptor_index];
        let entry = sums
            .entry(s.label.expect("labeled"))
            .or_insert_with(|| (vec![0.0; v.len()], 0));
        for (acc, x) in entry.0.iter_mut().zip(v) {
            *acc += x;
        }
        entry.1 += 1;
    }
    let query = &sample.descriptors[descriptor_index];
    let mut best: Option<(ClassId, f64)> = None;
    for (class, (sum, count)) in sums {
        let mut d = 0.0;
        for (s, q) in sum.iter().zip(query) {
            let diff = s / count as f64 - q;
            d += diff * diff;
        }
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((class, d));
        }
    }
    best.map(|(c, _)| c).unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub samples: usize,
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
}

pub fn evaluate(forest: &Forest, dataset: &Dataset) -> Result<Evaluation, NcmError> {
    let n = forest
        .n_classes()
        .max(dataset.classes().last().map_or(0, |c| c + 1));
    let mut confusion = vec![vec![0u64; n]; n];
    let mut correct = 0usize;
    for s in dataset.samples() {
        let (pred, _) = forest.predict(s)?;
        let truth = s.label.expect("labeled");
        confusion[truth][pred] += 1;
        correct += usize::from(truth == pred);
    }
    Ok(Evaluation {
        samples: dataset.len(),
        accuracy: if dataset.is_empty() {
            0.0
        } else {
            correct as f64 / dataset.len() as f64
        },
        confusion,
    })
}
