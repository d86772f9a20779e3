//! Experiment configs bundled into the binary.

pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, text: include_str!(concat!("../configs/", $name, ".cfg")) }),*]
    };
}

pub static BUNDLED: &[Bundled] = bundled![
    "benjamin_branch_alpha",
    "benjamin_a195_a199",
    "benjamin_a1_kdv_seed",
    "benjamin_a1_c_branch",
    "benjamin_c1_b1em2",
    "benjamin_c1_beta_branch",
    "ilwb_d01_branch",
    "ilwb_d01_a313",
    "ilwb_d09_branch",
    "ilwb_d01_c1_b1em2",
    "ilwb_d09_c1_b4em2",
    "translation_a195",
    "stability_a195",
    "stability_c1_b2em2",
    "resolution_m10gauss",
    "resolution_5gauss_b2em2",
    "dsw_5gauss_b6em2",
    "ilwb_5gauss_d01",
    "ilwb_5gauss_d09",
];

pub fn find(name: &str) -> Option<&'static Bundled> {
    let stem = name.strip_suffix(".cfg").unwrap_or(name);
    BUNDLED.iter().find(|b| b.name == stem)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|b| b.name)
}
