use crate::error::{Error, Result};
use crate::types::{Image, LabelVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetItem {
    pub id: String,
    pub image: Image,
    pub label: usize,
}

/// Labeled images sharing one shape, in on-disk order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    items: Vec<DatasetItem>,
    class_count: usize,
    class_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(items: Vec<DatasetItem>, class_count: usize) -> Result<Self> {
        if class_count == 0 {
            return Err(Error::InvalidArgument(
                "class count must be positive".into(),
            ));
        }
        if let Some(first) = items.first() {
            for item in &items[1..] {
                if !item.image.same_shape(&first.image) {
                    return Err(Error::Shape(format!(
                        "`{}` is {}x{}x{} but `{}` is {}x{}x{}",
                        item.id,
                        item.image.width(),
                        item.image.height(),
                        item.image.channels(),
                        first.id,
                        first.image.width(),
                        first.image.height(),
                        first.image.channels()
                    )));
                }
            }
        }
        if let Some(bad) = items.iter().find(|i| i.label >= class_count) {
            return Err(Error::InvalidArgument(format!(
                "`{}` has label {} but only {class_count} classes exist",
                bad.id, bad.label
            )));
        }
        Ok(Self {
            items,
            class_count,
            class_names: None,
        })
    }

    /// Wraps a packed `N x H x W x C` buffer; item ids are the decimal indices.
    pub fn from_packed(
        pixels: &[u8],
        count: usize,
        height: usize,
        width: usize,
        channels: usize,
        labels: &[usize],
        class_count: usize,
    ) -> Result<Self> {
        let per = width * height * channels;
        if count == 0 {
            return Err(Error::EmptyInput("batch has no images".into()));
        }
        if pixels.len() != count * per {
            return Err(Error::Shape(format!(
                "{count}x{height}x{width}x{channels} batch needs {} bytes, got {}",
                count * per,
                pixels.len()
            )));
        }
        if labels.len() != count {
            return Err(Error::Shape(format!(
                "{count} images but {} labels",
                labels.len()
            )));
        }
        let items = pixels
            .chunks_exact(per)
            .zip(labels)
            .enumerate()
            .map(|(i, (px, &label))| {
                Ok(DatasetItem {
                    id: i.to_string(),
                    image: Image::new(width, height, channels, px.to_vec())?,
                    label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(items, class_count)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Self {
        self.class_names = Some(names);
        self
    }

    pub fn items(&self) -> &[DatasetItem] {
        &self.items
    }

    pub fn get(&self, index: usize) -> &DatasetItem {
        &self.items[index]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// `(width, height, channels)` of every item, if any.
    pub fn shape(&self) -> Option<(usize, usize, usize)> {
        self.items
            .first()
            .map(|i| (i.image.width(), i.image.height(), i.image.channels()))
    }

    pub fn one_hot(&self, index: usize) -> LabelVector {
        LabelVector::one_hot(self.items[index].label, self.class_count)
            .expect("labels validated on construction")
    }
}
