//! Runnable case-study programs and the verbatim listings they normalize.

macro_rules! file {
    ($dir:literal, $n:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/stdlib/v1/", $dir, "/", $n, ".tol"))
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseStudy {
    pub name: &'static str,
    pub source: &'static str,
    /// Names that must be supplied as inputs.
    pub inputs: &'static [&'static str],
}

pub fn case_studies() -> Vec<CaseStudy> {
    vec![
        CaseStudy { name: "matmul", source: file!("cases", "matmul"), inputs: &["a", "b"] },
        CaseStudy { name: "conv2d", source: file!("cases", "conv2d"), inputs: &["in", "k", "s", "p"] },
        CaseStudy { name: "avgpool1d", source: file!("cases", "avgpool1d"), inputs: &["in", "k", "s", "p"] },
        CaseStudy { name: "relax", source: file!("cases", "relax"), inputs: &["E"] },
        CaseStudy { name: "resnet_block", source: file!("cases", "resnet_block"), inputs: &["in", "k1", "k2"] },
        CaseStudy { name: "kmeans", source: file!("cases", "kmeans"), inputs: &["data", "k"] },
    ]
}

pub fn case_study(name: &str) -> Option<CaseStudy> {
    case_studies().into_iter().find(|c| c.name == name)
}

/// The published listings as written, for parsing and formatting only.
pub fn listings() -> Vec<(&'static str, &'static str)> {
    vec![
        ("matmul", file!("listings", "matmul")),
        ("conv2d", file!("listings", "conv2d")),
        ("avgpool1d", file!("listings", "avgpool1d")),
        ("relax", file!("listings", "relax")),
        ("resnet_block", file!("listings", "resnet_block")),
        ("kmeans", file!("listings", "kmeans")),
    ]
}
