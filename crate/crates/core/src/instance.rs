//! Instances (a complex plus optional partition and family assertions) and
//! the JSON complex file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{PartiteStructure, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::families::Family;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    pub complex: SimplicialComplex,
    pub partition: Option<PartiteStructure>,
    /// Families the caller asserts the 1-skeleton belongs to.
    pub assumptions: Vec<Family>,
}

impl Instance {
    pub fn new(id: impl Into<String>, complex: SimplicialComplex) -> Self {
        Instance {
            id: id.into(),
            complex,
            partition: None,
            assumptions: Vec::new(),
        }
    }

    pub fn with_partition(mut self, p: PartiteStructure) -> Self {
        self.partition = Some(p);
        self
    }

    pub fn with_assumptions(mut self, families: impl IntoIterator<Item = Family>) -> Self {
        for f in families {
            if !self.assumptions.contains(&f) {
                self.assumptions.push(f);
            }
        }
        self
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile::Facets {
            vertices: Some(self.complex.labels().to_vec()),
            facets: self.complex.facets_labeled(),
            partition: self.partition.as_ref().map(|p| p.classes().to_vec()),
        }
    }
}

/// On-disk complex description.
///
/// Either `{"vertices": [...], "facets": [[...]], "partition": [[...]]}` (the
/// vertex list and partition optional) or the edge-list shorthand
/// `{"n": 4, "edges": [[0, 1], ...]}` over vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ComplexFile {
    Facets {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<VertexId>>,
        facets: Vec<Vec<VertexId>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<Vec<Vec<VertexId>>>,
    },
    EdgeList {
        n: u32,
        edges: Vec<[VertexId; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<Vec<Vec<VertexId>>>,
    },
}

impl ComplexFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::malformed(format!("complex file: {e}")))
    }

    /// Builds the instance. Without an explicit vertex list the order is
    /// first appearance in `facets`.
    pub fn into_instance(self, id: impl Into<String>) -> Result<Instance> {
        let (complex, partition) = match self {
            ComplexFile::Facets {
                vertices,
                facets,
                partition,
            } => {
                let x = match vertices {
                    Some(v) => SimplicialComplex::with_vertices(&v, &facets)?,
                    None => SimplicialComplex::from_facets(&facets)?,
                };
                (x, partition)
            }
            ComplexFile::EdgeList {
                n,
                edges,
                partition,
            } => {
                let verts: Vec<VertexId> = (0..n).collect();
                let edges: Vec<(VertexId, VertexId)> =
                    edges.iter().map(|[u, v]| (*u, *v)).collect();
                (SimplicialComplex::graph(&verts, &edges)?, partition)
            }
        };
        let mut inst = Instance::new(id, complex);
        if let Some(classes) = partition {
            inst.partition = Some(PartiteStructure::from_labels(&inst.complex, &classes)?);
        }
        Ok(inst)
    }
}

/// Reads a complex file; the instance id is the file stem.
pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into());
    ComplexFile::parse(&text)?.into_instance(id)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    let mut text = serde_json::to_string(&inst.to_file())?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
