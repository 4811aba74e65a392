use std::fs;
use std::path::Path;

use super::image_file::read_image;
use crate::dataset::{Dataset, DatasetItem};
use crate::error::{Error, Result};

/// Loads images listed in `labels_file` as `relative_path,class_index` lines,
/// resolved against `root`. Blank lines are skipped; the class count is one
/// more than the largest index seen.
pub fn load_image_dir(root: impl AsRef<Path>, labels_file: impl AsRef<Path>) -> Result<Dataset> {
    let (root, labels_file) = (root.as_ref(), labels_file.as_ref());
    let text = fs::read_to_string(labels_file).map_err(|e| Error::io_at(labels_file, e))?;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (rel, class) = line.rsplit_once(',').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `relative_path,class_index`, got `{line}`"),
        })?;
        let label: usize = class.trim().parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!(
                "class index `{}` is not a non-negative integer",
                class.trim()
            ),
        })?;
        let rel = rel.trim();
        let image = read_image(root.join(rel))?;
        items.push(DatasetItem {
            id: rel.to_string(),
            image,
            label,
        });
    }
    if items.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} lists no images",
            labels_file.display()
        )));
    }
    let class_count = items.iter().map(|i| i.label).max().unwrap_or(0) + 1;
    Dataset::new(items, class_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_image;
    use crate::types::Image;

    #[test]
    fn loads_in_file_order() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        for (name, v) in [("b.png", 1u8), ("a.png", 2), ("sub/c.ppm", 3)] {
            write_image(&Image::filled(4, 3, 3, v).unwrap(), dir.path().join(name)).unwrap();
        }
        let labels = dir.path().join("labels.csv");
        fs::write(&labels, "b.png,2\n\na.png,0\nsub/c.ppm,1\n").unwrap();
        let ds = load_image_dir(dir.path(), &labels).unwrap();
        let ids: Vec<&str> = ds.items().iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["b.png", "a.png", "sub/c.ppm"]);
        assert_eq!(ds.class_count(), 3);
        assert_eq!(ds.get(2).image.pixels()[0], 3);
    }

    #[test]
    fn empty_labels_file() {
        let dir = tempfile::tempdir().unwrap();
        let labels = dir.path().join("labels.csv");
        fs::write(&labels, "").unwrap();
        assert!(matches!(
            load_image_dir(dir.path(), &labels),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn absent_image_named() {
        let dir = tempfile::tempdir().unwrap();
        let labels = dir.path().join("labels.csv");
        fs::write(&labels, "ghost.png,0\n").unwrap();
        match load_image_dir(dir.path(), &labels) {
            Err(Error::NotFound(p)) => assert!(p.ends_with("ghost.png")),
            other => panic!("expected not-found, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_names_both() {
        let dir = tempfile::tempdir().unwrap();
        write_image(
            &Image::filled(4, 4, 1, 0).unwrap(),
            dir.path().join("x.png"),
        )
        .unwrap();
        write_image(
            &Image::filled(5, 4, 1, 0).unwrap(),
            dir.path().join("y.png"),
        )
        .unwrap();
        let labels = dir.path().join("labels.csv");
        fs::write(&labels, "x.png,0\ny.png,1\n").unwrap();
        let err = load_image_dir(dir.path(), &labels).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
        let msg = err.to_string();
        assert!(msg.contains("x.png") && msg.contains("y.png"), "{msg}");
    }

    #[test]
    fn malformed_line() {
        let dir = tempfile::tempdir().unwrap();
        let labels = dir.path().join("labels.csv");
        fs::write(&labels, "x.png;0\n").unwrap();
        assert!(matches!(
            load_image_dir(dir.path(), &labels),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
