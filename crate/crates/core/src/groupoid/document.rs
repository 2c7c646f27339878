use super::{shared_indexing, trivial_indexing, Groupoid, Indexing, Morphism};
use crate::error::{Error, Result};
use crate::semantics::{ElemMap, Structure};
use crate::syntax::Signature;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureDoc {
    pub sorts: Vec<String>,
    /// Relation name to the sorts of its arguments.
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub id: String,
    #[serde(default)]
    pub carrier: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub src: String,
    pub dst: String,
    /// Sort to element-to-element map.
    #[serde(default)]
    pub map: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexingDoc {
    /// Sort to parameter names.
    pub parameters: BTreeMap<String, Vec<String>>,
    /// Object id to parameter-to-element map.
    #[serde(default)]
    pub interpretation: BTreeMap<String, BTreeMap<String, String>>,
}

/// The on-disk groupoid document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub signature: SignatureDoc,
    pub objects: Vec<ObjectDoc>,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default)]
    pub auto_complete: bool,
    #[serde(default)]
    pub etale_complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indexing: Option<IndexingDoc>,
}

/// A validated groupoid with its indexing (trivial when the document has none).
#[derive(Debug, Clone)]
pub struct LoadedGroupoid {
    pub groupoid: Groupoid,
    pub indexing: Indexing,
    pub explicit_indexing: bool,
    pub auto_complete: bool,
    pub etale_complete: bool,
}

impl SignatureDoc {
    pub fn to_signature(&self) -> Result<Signature> {
        let mut sig = Signature::new();
        for s in &self.sorts {
            sig.add_sort(s)?;
        }
        for (r, arity) in &self.relations {
            let a: Vec<&str> = arity.iter().map(String::as_str).collect();
            sig.add_relation(r, &a)?;
        }
        Ok(sig)
    }

    pub fn from_signature(sig: &Signature) -> Self {
        SignatureDoc {
            sorts: sig.sorts.clone(),
            relations: sig
                .relations
                .iter()
                .map(|r| (r.name.clone(), sig.arity_names(r).into_iter().map(String::from).collect()))
                .collect(),
        }
    }
}

impl GroupoidDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Serializes a groupoid with every arrow listed explicitly.
    pub fn from_groupoid(g: &Groupoid, ix: Option<&Indexing>) -> Self {
        let sig = g.signature();
        let objects = g
            .objects()
            .iter()
            .map(|m| ObjectDoc {
                id: m.id.clone(),
                carrier: (0..sig.sorts.len())
                    .filter(|&s| m.size(s) > 0)
                    .map(|s| (sig.sort_name(s).to_string(), m.carrier(s).to_vec()))
                    .collect(),
                relations: sig
                    .relations
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| !m.relation(*r).is_empty())
                    .map(|(r, sym)| {
                        let tuples = m
                            .relation(r)
                            .tuples()
                            .iter()
                            .map(|t| m.show_tuple(&sym.arity, t))
                            .collect();
                        (sym.name.clone(), tuples)
                    })
                    .collect(),
            })
            .collect();
        let arrows = g
            .arrows()
            .iter()
            .map(|a| {
                let (m, n) = (g.object(a.src), g.object(a.dst));
                ArrowDoc {
                    src: m.id.clone(),
                    dst: n.id.clone(),
                    map: (0..sig.sorts.len())
                        .filter(|&s| m.size(s) > 0)
                        .map(|s| {
                            let f = a.map[s]
                                .iter()
                                .enumerate()
                                .map(|(x, &y)| (m.element_name(s, x).to_string(), n.element_name(s, y).to_string()))
                                .collect();
                            (sig.sort_name(s).to_string(), f)
                        })
                        .collect(),
                }
            })
            .collect();
        let indexing = ix.map(|ix| {
            let mut parameters: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for (p, s) in ix.params() {
                parameters.entry(sig.sort_name(*s).to_string()).or_default().push(p.clone());
            }
            let interpretation = g
                .objects()
                .iter()
                .enumerate()
                .map(|(o, m)| {
                    let row = (0..ix.len())
                        .filter_map(|p| ix.get(o, p).map(|e| (ix.name(p).to_string(), m.element_name(ix.sort(p), e).to_string())))
                        .collect();
                    (m.id.clone(), row)
                })
                .collect();
            IndexingDoc {
                parameters,
                interpretation,
            }
        });
        GroupoidDoc {
            signature: SignatureDoc::from_signature(sig),
            objects,
            arrows,
            auto_complete: false,
            etale_complete: false,
            indexing,
        }
    }

    /// Validates the document into a groupoid and indexing.
    pub fn build(&self) -> Result<LoadedGroupoid> {
        let sig = Arc::new(self.signature.to_signature()?);
        let objects = self
            .objects
            .iter()
            .map(|o| Structure::from_names(o.id.clone(), sig.clone(), &o.carrier, &o.relations))
            .collect::<Result<Vec<_>>>()?;
        let index = |id: &str| {
            objects
                .iter()
                .position(|m| m.id == id)
                .ok_or_else(|| Error::invalid(format!("arrow refers to unknown object `{id}`")))
        };
        let mut arrows = Vec::new();
        for a in &self.arrows {
            let (src, dst) = (index(&a.src)?, index(&a.dst)?);
            let map = arrow_map(&sig, &objects[src], &objects[dst], &a.map)?;
            arrows.push(Morphism { src, dst, map });
        }
        let groupoid = if self.etale_complete {
            let checked = Groupoid::with_signature(sig.clone(), objects, arrows, true)?;
            checked.etale_completion()
        } else {
            Groupoid::with_signature(sig.clone(), objects, arrows, self.auto_complete)?
        };
        let indexing = match &self.indexing {
            None => trivial_indexing(&groupoid),
            Some(doc) => {
                let mut params = Vec::new();
                for s in &sig.sorts {
                    for p in doc.parameters.get(s).into_iter().flatten() {
                        params.push((p.clone(), s.clone()));
                    }
                }
                for s in doc.parameters.keys() {
                    if sig.sort_id(s).is_none() {
                        return Err(Error::sort(s.clone(), "parameters declared for an undeclared sort"));
                    }
                }
                shared_indexing(&groupoid, &params, &doc.interpretation)?
            }
        };
        Ok(LoadedGroupoid {
            groupoid,
            indexing,
            explicit_indexing: self.indexing.is_some(),
            auto_complete: self.auto_complete,
            etale_complete: self.etale_complete,
        })
    }
}

fn arrow_map(
    sig: &Signature,
    m: &Structure,
    n: &Structure,
    doc: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<ElemMap> {
    let label = format!("{} -> {}", m.id, n.id);
    for s in doc.keys() {
        if sig.sort_id(s).is_none() {
            return Err(Error::invalid(format!("arrow {label}: unknown sort `{s}`")));
        }
    }
    let mut map = Vec::new();
    for (s, sort) in sig.sorts.iter().enumerate() {
        let empty = BTreeMap::new();
        let f = doc.get(sort).unwrap_or(&empty);
        let mut row = Vec::with_capacity(m.size(s));
        for e in m.carrier(s) {
            let target = f
                .get(e)
                .ok_or_else(|| Error::invalid(format!("arrow {label}: `{e}` is not mapped")))?;
            let j = n
                .element(s, target)
                .ok_or_else(|| Error::invalid(format!("arrow {label}: `{target}` is not an element of {}", n.id)))?;
            row.push(j);
        }
        for e in f.keys() {
            if m.element(s, e).is_none() {
                return Err(Error::invalid(format!("arrow {label}: `{e}` is not an element of {}", m.id)));
            }
        }
        map.push(row);
    }
    Ok(map)
}

/// Parses and validates a groupoid document.
pub fn load_groupoid(text: &str) -> Result<LoadedGroupoid> {
    GroupoidDoc::from_json(text)?.build()
}
