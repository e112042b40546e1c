use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploration::SearchInstance;
use crate::graph::{Graph, VertexId};
use crate::predictions::Prediction;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default)]
    pub integer_distance: bool,
}

/// On-disk instance: a JSON object
/// `{n, directed, edges: [[u, v, w], ...], root, goal, predictions, flags, embedding?}`.
/// `embedding[v]` is the position of `v` on the path `0 - ... - (n-1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default)]
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
    pub root: usize,
    pub goal: usize,
    pub predictions: Vec<f64>,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<usize>>,
}

impl InstanceFile {
    pub fn from_instance<S: Scalar>(inst: &SearchInstance<S>) -> Self {
        let g = inst.graph();
        InstanceFile {
            n: g.n(),
            directed: g.is_directed(),
            edges: g.edges().iter().map(|e| (e.u.0, e.v.0, e.weight.as_f64())).collect(),
            root: inst.root().0,
            goal: inst.goal().0,
            predictions: inst.predictions().values.iter().map(|x| x.as_f64()).collect(),
            flags: Flags {
                integer_distance: inst.integer_distance(),
            },
            embedding: inst.embedding().map(|m| m.iter().map(|v| v.0).collect()),
        }
    }

    pub fn into_instance<S: Scalar>(self) -> Result<SearchInstance<S>> {
        let dangling = |context: String, id: usize| Error::Parse {
            context,
            message: format!("vertex id {id} is out of range for n = {}", self.n),
        };
        for (i, &(u, v, _)) in self.edges.iter().enumerate() {
            for id in [u, v] {
                if id >= self.n {
                    return Err(dangling(format!("edges[{i}]"), id));
                }
            }
        }
        for (name, id) in [("root", self.root), ("goal", self.goal)] {
            if id >= self.n {
                return Err(dangling(name.into(), id));
            }
        }
        let g = Graph::new(self.n, self.directed, self.edges.iter().map(|&(u, v, w)| (u, v, S::of(w))))?;
        let f = Prediction::new(self.predictions.iter().map(|&x| S::of(x)).collect());
        SearchInstance::new(g, VertexId(self.root), VertexId(self.goal), f)?
            .with_integer_distance(self.flags.integer_distance)?
            .with_embedding(self.embedding.map(|m| m.into_iter().map(VertexId).collect()))
    }
}

pub fn instance_to_json<S: Scalar>(inst: &SearchInstance<S>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance files always serialize")
}

pub fn instance_from_json<S: Scalar>(text: &str) -> Result<SearchInstance<S>> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    file.into_instance()
}

pub fn save_instance<S: Scalar>(inst: &SearchInstance<S>, path: impl AsRef<Path>) -> Result<()> {
    let mut text = instance_to_json(inst);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_instance<S: Scalar>(path: impl AsRef<Path>) -> Result<SearchInstance<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    instance_from_json(&text).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dangling_vertex_is_a_parse_error() {
        let text = r#"{"n": 2, "edges": [[0, 5, 1.0]], "root": 0, "goal": 1, "predictions": [1, 0]}"#;
        match instance_from_json::<f64>(text) {
            Err(Error::Parse { context, .. }) => assert_eq!(context, "edges[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_weight_is_a_validation_error() {
        let text = r#"{"n": 2, "edges": [[0, 1, -1.0]], "root": 0, "goal": 1, "predictions": [1, 0]}"#;
        assert!(matches!(instance_from_json::<f64>(text), Err(Error::Validation { .. })));
    }

    #[test]
    fn malformed_json_reports_position() {
        let text = "{\n  \"n\": 2,\n  \"edges\": [[0, 1]]\n}";
        match instance_from_json::<f64>(text) {
            Err(Error::Parse { context, .. }) => assert!(context.starts_with("line 3")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn embedding_round_trip() {
        let g = Graph::<f64>::star(4, 1.0);
        let inst = SearchInstance::with_exact_predictions(g, VertexId(1), VertexId(3))
            .unwrap()
            .with_embedding(Some(vec![VertexId(1), VertexId(0), VertexId(2), VertexId(3)]))
            .unwrap();
        let back: SearchInstance<f64> = instance_from_json(&instance_to_json(&inst)).unwrap();
        assert_eq!(back.embedding(), inst.embedding());
        assert_eq!(back.graph().edges(), inst.graph().edges());
    }
}
