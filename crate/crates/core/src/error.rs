use core::fmt;

/// Everything that can go wrong inside the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Image side shorter than the 16 pixel minimum.
    ImageTooSmall { width: usize, height: usize },
    /// Pixel buffer length or channel value does not describe a valid image.
    InvalidImage(&'static str),
    /// Two inputs that must share a shape do not.
    DimensionMismatch { expected: usize, actual: usize },
    /// SLIC asked for more regions than `width * height / 16`.
    TargetTooLarge { target: usize, max: usize },
    /// Histograms with differing bin counts.
    BinCountMismatch { left: usize, right: usize },
    /// Descriptor list does not line up with the superpixel labels.
    IndexMismatch { regions: usize, descriptors: usize },
    /// The ranking system could not be factored.
    SingularSystem,
    /// An image border has no superpixel touching it.
    EmptyBoundary,
    /// Weight fitting was given no samples.
    EmptyValidationSet,
    /// More clusters requested than there are regions.
    ClusterCountTooLarge { k: usize, regions: usize },
    /// A parameter is outside its admissible range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ImageTooSmall { width, height } => {
                write!(f, "image {width}x{height} is smaller than 16x16")
            }
            Error::InvalidImage(why) => write!(f, "invalid image: {why}"),
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::TargetTooLarge { target, max } => {
                write!(f, "{target} superpixels requested, at most {max} allowed")
            }
            Error::BinCountMismatch { left, right } => {
                write!(f, "histogram bin counts differ ({left} vs {right})")
            }
            Error::IndexMismatch { regions, descriptors } => {
                write!(f, "{descriptors} descriptors for {regions} regions")
            }
            Error::SingularSystem => f.write_str("ranking system is singular"),
            Error::EmptyBoundary => f.write_str("an image border has no touching region"),
            Error::EmptyValidationSet => f.write_str("validation set is empty"),
            Error::ClusterCountTooLarge { k, regions } => {
                write!(f, "{k} clusters requested for {regions} regions")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
