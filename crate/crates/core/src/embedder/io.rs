use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedder::EmbeddingModel;
use crate::error::{Error, Result};
use crate::hin::{NodeId, Symbols};

/// Node vectors keyed by external id, as read back from an embedding file.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    names: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    data: Vec<f64>,
}

impl Embeddings {
    pub fn new(names: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != names.len() * dim {
            return Err(Error::InvalidInput(format!(
                "{} values for {} rows of dimension {dim}",
                data.len(),
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate embedding for `{n}`")));
            }
        }
        Ok(Embeddings {
            names,
            index,
            dim,
            data,
        })
    }

    /// Center vectors of a model, one row per node in id order.
    pub fn from_model(model: &EmbeddingModel, symbols: &Symbols) -> Self {
        let names = (0..model.node_count() as u32)
            .map(|i| symbols.node_name(NodeId(i)).to_owned())
            .collect();
        Self::new(names, model.dim(), model.center_matrix().to_vec())
            .expect("model shape is consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.index
            .get(name)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }
}

/// Writes `"|V| d"` then one `id x1 .. xd` line per node, sorted by id.
/// Values use the shortest representation that parses back exactly.
pub fn export_embeddings(model: &EmbeddingModel, symbols: &Symbols, path: &Path) -> Result<()> {
    let emb = Embeddings::from_model(model, symbols);
    write_embeddings(&emb, path)
}

pub fn write_embeddings(emb: &Embeddings, path: &Path) -> Result<()> {
    let mut order: Vec<usize> = (0..emb.len()).collect();
    order.sort_by(|&a, &b| emb.names[a].cmp(&emb.names[b]));
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{} {}", emb.len(), emb.dim)?;
        for i in order {
            w.write_all(emb.names[i].as_bytes())?;
            for x in &emb.data[i * emb.dim..(i + 1) * emb.dim] {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn import_embeddings(path: &Path) -> Result<Embeddings> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header"))?
        .map_err(|e| Error::io(path, e))?;
    let mut fields = header.split_whitespace().map(str::parse::<usize>);
    let (rows, dim) = match (fields.next(), fields.next(), fields.next()) {
        (Some(Ok(r)), Some(Ok(d)), None) => (r, d),
        _ => return Err(Error::parse(path, 1, format!("bad header `{header}`"))),
    };
    let mut names = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows * dim);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let name = parts.next().unwrap_or_default().to_owned();
        let before = data.len();
        for p in parts {
            let x: f64 = p
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad value `{p}`")))?;
            data.push(x);
        }
        if data.len() - before != dim {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {dim} values, found {}", data.len() - before),
            ));
        }
        names.push(name);
    }
    if names.len() != rows {
        return Err(Error::parse(
            path,
            1,
            format!("header declares {rows} rows, file has {}", names.len()),
        ));
    }
    Embeddings::new(names, dim, data).map_err(|e| Error::parse(path, 0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedder::{init_model, TrainConfig};
    use crate::hin::HinBuilder;

    #[test]
    fn export_import_round_trip_sorted() {
        let h = HinBuilder::new()
            .node("zeta", "P")
            .node("alpha", "A")
            .node("mid", "A")
            .edge("zeta", "alpha")
            .build();
        let m = init_model(&h, &TrainConfig { dim: 5, seed: 8, ..Default::default() }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        export_embeddings(&m, h.symbols(), &path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "3 5");
        let ids: Vec<&str> = lines[1..].iter().map(|l| l.split(' ').next().unwrap()).collect();
        assert_eq!(ids, vec!["alpha", "mid", "zeta"]);

        let back = import_embeddings(&path).unwrap();
        assert_eq!(back.dim(), 5);
        for v in h.nodes() {
            assert_eq!(back.get(h.node_name(v)).unwrap(), m.center_vec(v));
        }
    }

    #[test]
    fn header_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "2 2\na 1 2\n").unwrap();
        assert!(import_embeddings(&path).is_err());
        std::fs::write(&path, "1 2\na 1\n").unwrap();
        let msg = import_embeddings(&path).unwrap_err().to_string();
        assert!(msg.contains(":2:"), "{msg}");
    }
}
