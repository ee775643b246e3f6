//! The simulation file: mesh input, outputs, materials, regions and the
//! ordered list of sequence steps.

use std::path::Path;

use super::expr::Expression;
use super::xml::{parse_document, required, single, ConfigError, Scope};
use crate::analysis::{AnalysisSpec, BcSet, RegionValue, TransientSpec};

/// Analysis kinds accepted under `<analysis>`.
pub const ANALYSIS_KINDS: [&str; 4] = ["static", "transient", "harmonic", "eigenFrequency"];

/// The only stored nodal quantity.
pub const PRESSURE_RESULT: &str = "acouPressure";

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    /// Gmsh 2.2 ASCII file, relative to the configuration file.
    Gmsh { file: String },
    /// Uniform line2 mesh of `[0, length]`.
    Interval {
        length: f64,
        elements: usize,
        region: String,
        left: String,
        right: String,
    },
    /// Uniform quad4 mesh of `[0, lx] × [0, ly]`.
    Grid {
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
        region: String,
        left: String,
        right: String,
        bottom: String,
        top: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub vtk: bool,
    pub probes: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Plane,
    ThreeD,
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Plane => "plane",
            Geometry::ThreeD => "3d",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMaterial {
    pub region: String,
    pub material: String,
}

/// Initial data of a transient step. Either expressions or the result of an
/// earlier static or eigenfrequency step (`mode` is 1-based and only
/// meaningful for eigenfrequency steps; it defaults to 1).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialSpec {
    pub p0: Option<Expression>,
    pub dp0: Option<Expression>,
    pub from_step: Option<usize>,
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeResult {
    /// Transient snapshot stride; ignored by the other analyses.
    pub save_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticPde {
    pub regions: Vec<String>,
    pub bcs: BcSet,
    pub initial: Option<InitialSpec>,
    pub store: Option<NodeResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStep {
    pub index: usize,
    pub analysis: AnalysisSpec,
    pub pde: AcousticPde,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub mesh: MeshSource,
    pub output: OutputSpec,
    /// Material database, relative to the configuration file.
    pub material_file: String,
    pub geometry: Geometry,
    pub regions: Vec<RegionMaterial>,
    pub steps: Vec<SequenceStep>,
}

impl SimulationConfig {
    pub fn material_of(&self, region: &str) -> Option<&str> {
        self.regions
            .iter()
            .find(|r| r.region == region)
            .map(|r| r.material.as_str())
    }

    pub fn step(&self, index: usize) -> Option<&SequenceStep> {
        self.steps.iter().find(|s| s.index == index)
    }
}

pub fn parse_simulation_file(text: &str) -> Result<SimulationConfig, ConfigError> {
    let doc = parse_document(text)?;
    let root = Scope::root(&doc);
    if root.name() != "cfsSimulation" {
        return Err(root.error(format!("root element must be `cfsSimulation`, found `{}`", root.name())));
    }
    root.allow_attributes(&[])?;
    let children = root.children(&["fileFormats", "domain", "sequenceStep"])?;

    let formats = required(&root, &children, "fileFormats")?;
    let (mesh, output, material_file) = parse_file_formats(formats)?;
    let domain = required(&root, &children, "domain")?;
    let (geometry, regions) = parse_domain(domain)?;

    let step_scopes: Vec<_> = children.iter().filter(|c| c.name() == "sequenceStep").collect();
    if step_scopes.is_empty() {
        return Err(root.missing("sequenceStep"));
    }
    let mut steps: Vec<SequenceStep> = Vec::new();
    for scope in step_scopes {
        let step = parse_step(scope, &steps, &regions)?;
        steps.push(step);
    }
    Ok(SimulationConfig {
        mesh,
        output,
        material_file,
        geometry,
        regions,
        steps,
    })
}

/// Reads and parses a simulation file.
pub fn read_simulation_file(path: impl AsRef<Path>) -> Result<SimulationConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_simulation_file(&text)
}

fn parse_file_formats(s: &Scope) -> Result<(MeshSource, OutputSpec, String), ConfigError> {
    s.allow_attributes(&[])?;
    let children = s.children(&["input", "output", "materialData"])?;

    let input = required(s, &children, "input")?;
    input.allow_attributes(&[])?;
    let sources = input.children(&["gmsh", "interval", "grid"])?;
    let mesh = match sources.as_slice() {
        [one] => parse_mesh_source(one)?,
        [] => return Err(input.error("expected one of `gmsh`, `interval`, `grid`")),
        [_, extra, ..] => return Err(extra.error("only one mesh input may be given")),
    };

    let output = match single(&children, "output")? {
        None => OutputSpec::default(),
        Some(o) => parse_output(o)?,
    };

    let material = required(s, &children, "materialData")?;
    material.allow_attributes(&["file", "format"])?;
    let file = material.required_attr("file")?.to_string();
    if let Some(format) = material.attr("format") {
        if format != "xml" {
            return Err(material.error(format!("material format must be `xml`, found `{format}`")));
        }
    }
    material.children(&[])?;
    Ok((mesh, output, file))
}

fn parse_mesh_source(s: &Scope) -> Result<MeshSource, ConfigError> {
    s.children(&[])?;
    let name = |attr: &str| -> Result<String, ConfigError> { Ok(s.required_attr(attr)?.to_string()) };
    Ok(match s.name() {
        "gmsh" => {
            s.allow_attributes(&["file"])?;
            MeshSource::Gmsh { file: name("file")? }
        }
        "interval" => {
            s.allow_attributes(&["length", "elements", "region", "left", "right"])?;
            MeshSource::Interval {
                length: s.required_parse("length")?,
                elements: s.required_parse("elements")?,
                region: name("region")?,
                left: name("left")?,
                right: name("right")?,
            }
        }
        _ => {
            s.allow_attributes(&["lx", "ly", "nx", "ny", "region", "left", "right", "bottom", "top"])?;
            MeshSource::Grid {
                lx: s.required_parse("lx")?,
                ly: s.required_parse("ly")?,
                nx: s.required_parse("nx")?,
                ny: s.required_parse("ny")?,
                region: name("region")?,
                left: name("left")?,
                right: name("right")?,
                bottom: name("bottom")?,
                top: name("top")?,
            }
        }
    })
}

fn parse_output(s: &Scope) -> Result<OutputSpec, ConfigError> {
    s.allow_attributes(&[])?;
    let children = s.children(&["vtk", "probes"])?;
    let mut out = OutputSpec::default();
    if let Some(v) = single(&children, "vtk")? {
        v.allow_attributes(&[])?;
        v.children(&[])?;
        out.vtk = true;
    }
    if let Some(p) = single(&children, "probes")? {
        p.allow_attributes(&[])?;
        for probe in p.children(&["probe"])? {
            probe.allow_attributes(&["x", "y", "z"])?;
            probe.children(&[])?;
            let coord = |a: &str| -> Result<f64, ConfigError> {
                let v: f64 = probe.parse_attr(a)?.unwrap_or(0.0);
                if !v.is_finite() {
                    return Err(probe.error(format!("probe coordinate `{a}` must be finite")));
                }
                Ok(v)
            };
            out.probes.push([coord("x")?, coord("y")?, coord("z")?]);
        }
    }
    Ok(out)
}

fn parse_domain(s: &Scope) -> Result<(Geometry, Vec<RegionMaterial>), ConfigError> {
    s.allow_attributes(&["geometryType"])?;
    let geometry = match s.required_attr("geometryType")? {
        "plane" => Geometry::Plane,
        "3d" => Geometry::ThreeD,
        other => return Err(s.error(format!("unsupported geometryType `{other}`; available: plane, 3d"))),
    };
    let children = s.children(&["regionList"])?;
    let list = required(s, &children, "regionList")?;
    list.allow_attributes(&[])?;
    let mut regions: Vec<RegionMaterial> = Vec::new();
    for r in list.children(&["region"])? {
        r.allow_attributes(&["name", "material"])?;
        r.children(&[])?;
        let region = r.required_attr("name")?.to_string();
        if regions.iter().any(|x| x.region == region) {
            return Err(r.error(format!("region `{region}` listed twice")));
        }
        regions.push(RegionMaterial {
            region,
            material: r.required_attr("material")?.to_string(),
        });
    }
    if regions.is_empty() {
        return Err(list.missing("region"));
    }
    Ok((geometry, regions))
}

fn parse_step(s: &Scope, earlier: &[SequenceStep], regions: &[RegionMaterial]) -> Result<SequenceStep, ConfigError> {
    s.allow_attributes(&["index"])?;
    let index: usize = s.required_parse("index")?;
    let expected_min = earlier.last().map_or(1, |p| p.index + 1);
    if earlier.is_empty() && index != 1 {
        return Err(s.error(format!("the first sequence step must have index 1, found {index}")));
    }
    if index < expected_min {
        return Err(s.error(format!(
            "sequence step indices must increase strictly; {index} follows {}",
            expected_min - 1
        )));
    }
    let children = s.children(&["analysis", "pdeList"])?;
    let analysis = parse_analysis(required(s, &children, "analysis")?)?;

    let pde_list = required(s, &children, "pdeList")?;
    pde_list.allow_attributes(&[])?;
    let pde_children = pde_list.any_children()?;
    if let Some(bad) = pde_children.iter().find(|c| c.name() != "acoustic") {
        return Err(ConfigError::UnsupportedPde {
            location: bad.location(),
            name: bad.name().to_string(),
        });
    }
    let acoustic = required(pde_list, &pde_children, "acoustic")?;
    let pde = parse_acoustic(acoustic, &analysis, earlier, regions)?;
    Ok(SequenceStep { index, analysis, pde })
}

fn parse_analysis(s: &Scope) -> Result<AnalysisSpec, ConfigError> {
    s.allow_attributes(&[])?;
    // unknown kinds get a dedicated error below
    let children = s.any_children()?;
    let kind = match children.as_slice() {
        [one] => one,
        [] => {
            return Err(s.error(format!(
                "expected one analysis kind; available: {}",
                ANALYSIS_KINDS.join(", ")
            )))
        }
        [_, extra, ..] => return Err(extra.error("only one analysis kind may be given per sequence step")),
    };
    let spec = match kind.name() {
        "static" => {
            kind.allow_attributes(&[])?;
            kind.children(&[])?;
            AnalysisSpec::Static
        }
        "transient" => {
            kind.allow_attributes(&["numSteps", "deltaT", "beta", "gamma"])?;
            kind.children(&[])?;
            let mut spec = TransientSpec::new(kind.required_parse("deltaT")?, kind.required_parse("numSteps")?);
            if let Some(beta) = kind.parse_attr("beta")? {
                spec.beta = beta;
            }
            if let Some(gamma) = kind.parse_attr("gamma")? {
                spec.gamma = gamma;
            }
            AnalysisSpec::Transient(spec)
        }
        "harmonic" => parse_harmonic(kind)?,
        "eigenFrequency" => {
            kind.allow_attributes(&["numModes", "shift"])?;
            kind.children(&[])?;
            AnalysisSpec::Eigenfrequency {
                modes: kind.required_parse("numModes")?,
                shift: kind.parse_attr("shift")?,
            }
        }
        other => {
            return Err(ConfigError::UnsupportedAnalysis {
                location: kind.location(),
                kind: other.to_string(),
                available: ANALYSIS_KINDS.to_vec(),
            })
        }
    };
    spec.validate().map_err(|e| kind.error(e.to_string()))?;
    Ok(spec)
}

fn parse_harmonic(s: &Scope) -> Result<AnalysisSpec, ConfigError> {
    s.allow_attributes(&["startFreq", "stopFreq", "numFreq"])?;
    let children = s.children(&["frequencyList"])?;
    let sweep = ["startFreq", "stopFreq", "numFreq"].iter().any(|a| s.attr(a).is_some());
    let frequencies = match (single(&children, "frequencyList")?, sweep) {
        (Some(_), true) => return Err(s.error("give either a frequencyList or startFreq/stopFreq/numFreq, not both")),
        (Some(list), false) => list.text_list::<f64>()?,
        (None, true) => {
            let start: f64 = s.required_parse("startFreq")?;
            let stop: f64 = s.required_parse("stopFreq")?;
            let n: usize = s.required_parse("numFreq")?;
            match n {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            }
        }
        (None, false) => return Err(s.missing("frequencyList")),
    };
    Ok(AnalysisSpec::Harmonic { frequencies })
}

fn parse_acoustic(
    s: &Scope,
    analysis: &AnalysisSpec,
    earlier: &[SequenceStep],
    domain: &[RegionMaterial],
) -> Result<AcousticPde, ConfigError> {
    s.allow_attributes(&[])?;
    let children = s.children(&["regionList", "bcsAndLoads", "initialConditions", "storeResults"])?;

    let list = required(s, &children, "regionList")?;
    list.allow_attributes(&[])?;
    let mut regions = Vec::new();
    for r in list.children(&["region"])? {
        r.allow_attributes(&["name"])?;
        r.children(&[])?;
        let name = r.required_attr("name")?.to_string();
        if !domain.iter().any(|d| d.region == name) {
            return Err(r.error(format!("region `{name}` has no material in domain/regionList")));
        }
        if regions.contains(&name) {
            return Err(r.error(format!("region `{name}` listed twice")));
        }
        regions.push(name);
    }
    if regions.is_empty() {
        return Err(list.missing("region"));
    }

    let mut bcs = BcSet::default();
    if let Some(b) = single(&children, "bcsAndLoads")? {
        b.allow_attributes(&[])?;
        for entry in b.children(&["dirichlet", "neumann", "source"])? {
            entry.allow_attributes(&["region", "value"])?;
            entry.children(&[])?;
            let rv = RegionValue::new(entry.required_attr("region")?, entry.expression_attr("value")?);
            match entry.name() {
                "dirichlet" => bcs.dirichlet.push(rv),
                "neumann" => bcs.neumann.push(rv),
                _ => bcs.sources.push(rv),
            }
        }
    }

    let initial = match single(&children, "initialConditions")? {
        None => None,
        Some(ic) => Some(parse_initial(ic, analysis, earlier)?),
    };

    let store = match single(&children, "storeResults")? {
        None => None,
        Some(sr) => {
            sr.allow_attributes(&[])?;
            let results = sr.children(&["nodeResult"])?;
            match single(&results, "nodeResult")? {
                None => None,
                Some(nr) => {
                    nr.allow_attributes(&["type", "saveEvery"])?;
                    nr.children(&[])?;
                    let quantity = nr.required_attr("type")?;
                    if quantity != PRESSURE_RESULT {
                        return Err(nr.error(format!(
                            "unknown result type `{quantity}`; available: {PRESSURE_RESULT}"
                        )));
                    }
                    let save_every = nr.parse_attr("saveEvery")?.unwrap_or(1);
                    if save_every == 0 {
                        return Err(nr.error("saveEvery must be at least 1"));
                    }
                    Some(NodeResult { save_every })
                }
            }
        }
    };
    Ok(AcousticPde {
        regions,
        bcs,
        initial,
        store,
    })
}

fn parse_initial(s: &Scope, analysis: &AnalysisSpec, earlier: &[SequenceStep]) -> Result<InitialSpec, ConfigError> {
    if !matches!(analysis, AnalysisSpec::Transient(_)) {
        return Err(s.error(format!(
            "initial conditions are only meaningful for transient steps, not {}",
            analysis.kind_name()
        )));
    }
    s.allow_attributes(&["initialStateFromStep", "mode"])?;
    let children = s.children(&["p0", "dp0"])?;
    let value = |name: &str| -> Result<Option<Expression>, ConfigError> {
        match single(&children, name)? {
            None => Ok(None),
            Some(v) => {
                v.allow_attributes(&["value"])?;
                v.children(&[])?;
                Ok(Some(v.expression_attr("value")?))
            }
        }
    };
    let spec = InitialSpec {
        p0: value("p0")?,
        dp0: value("dp0")?,
        from_step: s.parse_attr("initialStateFromStep")?,
        mode: s.parse_attr("mode")?,
    };
    if let Some(from) = spec.from_step {
        let Some(source) = earlier.iter().find(|st| st.index == from) else {
            return Err(s.error(format!(
                "initialStateFromStep = {from} does not name an earlier sequence step"
            )));
        };
        if spec.p0.is_some() {
            return Err(s.error("p0 and initialStateFromStep are mutually exclusive"));
        }
        match (&source.analysis, spec.mode) {
            (AnalysisSpec::Static, None) => {}
            (AnalysisSpec::Static, Some(_)) => return Err(s.error("mode only applies to eigenfrequency steps")),
            (AnalysisSpec::Eigenfrequency { modes, .. }, mode) => {
                let mode = mode.unwrap_or(1);
                if mode == 0 || mode > *modes {
                    return Err(s.error(format!("mode must lie in 1..={modes}, got {mode}")));
                }
            }
            (other, _) => {
                return Err(s.error(format!(
                    "initial state can come from a static or eigenfrequency step, step {from} is {}",
                    other.kind_name()
                )))
            }
        }
    } else if spec.mode.is_some() {
        return Err(s.error("mode requires initialStateFromStep"));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<?xml version="1.0"?>
<cfsSimulation xmlns="http://www.cfs++.org" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"
    xsi:schemaLocation="http://www.cfs++.org simulation.xsd">
  <fileFormats>
    <input><gmsh file="duct.msh"/></input>
    <output><vtk/></output>
    <materialData file="../material/mat.xml" format="xml"/>
  </fileFormats>
  <domain geometryType="3d">
    <regionList><region name="duct" material="air"/></regionList>
  </domain>
  <sequenceStep index="1">
    <analysis><transient numSteps="10" deltaT="1e-3"/></analysis>
    <pdeList>
      <acoustic>
        <regionList><region name="duct"/></regionList>
        <bcsAndLoads><dirichlet region="left" value="sin(2*pi*t)"/></bcsAndLoads>
        <storeResults><nodeResult type="acouPressure" saveEvery="5"/></storeResults>
      </acoustic>
    </pdeList>
  </sequenceStep>
</cfsSimulation>"#;

    #[test]
    fn minimal_transient() {
        let cfg = parse_simulation_file(MINIMAL).unwrap();
        assert_eq!(cfg.material_file, "../material/mat.xml");
        assert_eq!(cfg.geometry, Geometry::ThreeD);
        assert_eq!(cfg.material_of("duct"), Some("air"));
        assert!(cfg.output.vtk);
        let step = &cfg.steps[0];
        assert_eq!(step.analysis, AnalysisSpec::Transient(TransientSpec::new(1e-3, 10)));
        assert_eq!(step.pde.bcs.dirichlet[0].region, "left");
        assert_eq!(step.pde.store, Some(NodeResult { save_every: 5 }));
    }

    fn schema_path(text: &str) -> String {
        match parse_simulation_file(text).unwrap_err() {
            ConfigError::Schema { location, .. } => location.path,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_step_reports_path() {
        let start = MINIMAL.find("<sequenceStep").unwrap();
        let end = MINIMAL.find("</cfsSimulation>").unwrap();
        let text = format!("{}{}", &MINIMAL[..start], &MINIMAL[end..]);
        assert_eq!(schema_path(&text), "cfsSimulation/sequenceStep");
    }

    #[test]
    fn multiharmonic_is_unsupported() {
        let text = MINIMAL.replace(r#"<transient numSteps="10" deltaT="1e-3"/>"#, r#"<multiharmonic/>"#);
        match parse_simulation_file(&text).unwrap_err() {
            ConfigError::UnsupportedAnalysis {
                kind,
                available,
                location,
            } => {
                assert_eq!(kind, "multiharmonic");
                assert!(available.contains(&"harmonic"));
                assert_eq!(location.path, "cfsSimulation/sequenceStep/analysis/multiharmonic");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_element_and_pde() {
        let text = MINIMAL.replace("<vtk/>", "<vtk/><hdf5/>");
        assert_eq!(schema_path(&text), "cfsSimulation/fileFormats/output/hdf5");
        let text = MINIMAL.replace("</acoustic>", "</acoustic><mechanic/>");
        assert!(matches!(
            parse_simulation_file(&text),
            Err(ConfigError::UnsupportedPde { name, .. }) if name == "mechanic"
        ));
    }

    #[test]
    fn xml_syntax_has_position() {
        let err = parse_simulation_file("<cfsSimulation>\n  <domain>\n</cfsSimulation>").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn harmonic_sweep() {
        let text = MINIMAL.replace(
            r#"<transient numSteps="10" deltaT="1e-3"/>"#,
            r#"<harmonic startFreq="0.1" stopFreq="0.3" numFreq="3"/>"#,
        );
        let cfg = parse_simulation_file(&text).unwrap();
        let AnalysisSpec::Harmonic { frequencies } = &cfg.steps[0].analysis else {
            panic!()
        };
        assert_eq!(frequencies.len(), 3);
        assert!((frequencies[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn initial_state_must_name_earlier_eigen_or_static_step() {
        let text = MINIMAL.replace(
            "<storeResults>",
            r#"<initialConditions initialStateFromStep="1"/><storeResults>"#,
        );
        let err = parse_simulation_file(&text).unwrap_err();
        assert!(err.to_string().contains("earlier"), "{err}");
    }

    #[test]
    fn pde_region_needs_material() {
        let text = MINIMAL.replace(r#"<region name="duct"/>"#, r#"<region name="air"/>"#);
        assert_eq!(
            schema_path(&text),
            "cfsSimulation/sequenceStep/pdeList/acoustic/regionList/region"
        );
    }
}
