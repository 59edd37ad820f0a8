use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub file: String,
    pub format: &'static str,
    pub description: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<&'static str>,
}

/// Writes artifacts into one directory and remembers what it wrote.
pub struct ArtifactWriter {
    dir: PathBuf,
    pub artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), artifacts: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn csv(
        &mut self,
        file: &str,
        description: impl Into<String>,
        columns: &[&'static str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(file))?;
        w.write_record(columns)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.artifacts.push(Artifact {
            file: file.into(),
            format: "csv",
            description: description.into(),
            columns: columns.to_vec(),
        });
        Ok(())
    }

    pub fn json(&mut self, file: &str, description: impl Into<String>, value: &impl Serialize) -> anyhow::Result<()> {
        write_json(&self.dir.join(file), value)?;
        self.artifacts.push(Artifact {
            file: file.into(),
            format: "json",
            description: description.into(),
            columns: Vec::new(),
        });
        Ok(())
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
