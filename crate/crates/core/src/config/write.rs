//! Serializes a [`SimulationConfig`] back to XML accepted by
//! [`parse_simulation_file`](super::parse_simulation_file).

use std::fmt::Write;

use super::simulation::{MeshSource, SimulationConfig, PRESSURE_RESULT};
use crate::analysis::{AnalysisSpec, RegionValue};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Floats use Rust's shortest round-trip representation, so parsing the
/// output reproduces every value exactly.
pub fn write_simulation(cfg: &SimulationConfig) -> String {
    let mut s = String::new();
    let w = &mut s;
    // writing into a String cannot fail
    let _ = writeln!(w, "<?xml version=\"1.0\"?>");
    let _ = writeln!(w, "<cfsSimulation xmlns=\"http://www.cfs++.org\">");
    let _ = writeln!(w, "  <fileFormats>");
    let _ = write!(w, "    <input>");
    match &cfg.mesh {
        MeshSource::Gmsh { file } => {
            let _ = write!(w, "<gmsh file=\"{}\"/>", escape(file));
        }
        MeshSource::Interval {
            length,
            elements,
            region,
            left,
            right,
        } => {
            let _ = write!(
                w,
                "<interval length=\"{length}\" elements=\"{elements}\" region=\"{}\" left=\"{}\" right=\"{}\"/>",
                escape(region),
                escape(left),
                escape(right)
            );
        }
        MeshSource::Grid {
            lx,
            ly,
            nx,
            ny,
            region,
            left,
            right,
            bottom,
            top,
        } => {
            let _ = write!(
                w,
                "<grid lx=\"{lx}\" ly=\"{ly}\" nx=\"{nx}\" ny=\"{ny}\" region=\"{}\" left=\"{}\" right=\"{}\" bottom=\"{}\" top=\"{}\"/>",
                escape(region),
                escape(left),
                escape(right),
                escape(bottom),
                escape(top)
            );
        }
    }
    let _ = writeln!(w, "</input>");
    let _ = writeln!(w, "    <output>");
    if cfg.output.vtk {
        let _ = writeln!(w, "      <vtk/>");
    }
    if !cfg.output.probes.is_empty() {
        let _ = writeln!(w, "      <probes>");
        for [x, y, z] in &cfg.output.probes {
            let _ = writeln!(w, "        <probe x=\"{x}\" y=\"{y}\" z=\"{z}\"/>");
        }
        let _ = writeln!(w, "      </probes>");
    }
    let _ = writeln!(w, "    </output>");
    let _ = writeln!(
        w,
        "    <materialData file=\"{}\" format=\"xml\"/>",
        escape(&cfg.material_file)
    );
    let _ = writeln!(w, "  </fileFormats>");
    let _ = writeln!(w, "  <domain geometryType=\"{}\">", cfg.geometry.as_str());
    let _ = writeln!(w, "    <regionList>");
    for r in &cfg.regions {
        let _ = writeln!(
            w,
            "      <region name=\"{}\" material=\"{}\"/>",
            escape(&r.region),
            escape(&r.material)
        );
    }
    let _ = writeln!(w, "    </regionList>");
    let _ = writeln!(w, "  </domain>");

    for step in &cfg.steps {
        let _ = writeln!(w, "  <sequenceStep index=\"{}\">", step.index);
        let _ = write!(w, "    <analysis>");
        match &step.analysis {
            AnalysisSpec::Static => {
                let _ = write!(w, "<static/>");
            }
            AnalysisSpec::Transient(t) => {
                let _ = write!(
                    w,
                    "<transient numSteps=\"{}\" deltaT=\"{}\" beta=\"{}\" gamma=\"{}\"/>",
                    t.n_steps, t.dt, t.beta, t.gamma
                );
            }
            AnalysisSpec::Harmonic { frequencies } => {
                let list: Vec<String> = frequencies.iter().map(|f| f.to_string()).collect();
                let _ = write!(
                    w,
                    "<harmonic><frequencyList>{}</frequencyList></harmonic>",
                    list.join(" ")
                );
            }
            AnalysisSpec::Eigenfrequency { modes, shift } => {
                let _ = write!(w, "<eigenFrequency numModes=\"{modes}\"");
                if let Some(shift) = shift {
                    let _ = write!(w, " shift=\"{shift}\"");
                }
                let _ = write!(w, "/>");
            }
        }
        let _ = writeln!(w, "</analysis>");
        let _ = writeln!(w, "    <pdeList>");
        let _ = writeln!(w, "      <acoustic>");
        let _ = writeln!(w, "        <regionList>");
        for r in &step.pde.regions {
            let _ = writeln!(w, "          <region name=\"{}\"/>", escape(r));
        }
        let _ = writeln!(w, "        </regionList>");
        let bcs = &step.pde.bcs;
        let _ = writeln!(w, "        <bcsAndLoads>");
        let entries = |w: &mut String, tag: &str, list: &[RegionValue]| {
            for rv in list {
                let _ = writeln!(
                    w,
                    "          <{tag} region=\"{}\" value=\"{}\"/>",
                    escape(&rv.region),
                    escape(rv.value.source())
                );
            }
        };
        entries(w, "dirichlet", &bcs.dirichlet);
        entries(w, "neumann", &bcs.neumann);
        entries(w, "source", &bcs.sources);
        let _ = writeln!(w, "        </bcsAndLoads>");
        if let Some(ic) = &step.pde.initial {
            let _ = write!(w, "        <initialConditions");
            if let Some(from) = ic.from_step {
                let _ = write!(w, " initialStateFromStep=\"{from}\"");
            }
            if let Some(mode) = ic.mode {
                let _ = write!(w, " mode=\"{mode}\"");
            }
            let _ = writeln!(w, ">");
            if let Some(p0) = &ic.p0 {
                let _ = writeln!(w, "          <p0 value=\"{}\"/>", escape(p0.source()));
            }
            if let Some(dp0) = &ic.dp0 {
                let _ = writeln!(w, "          <dp0 value=\"{}\"/>", escape(dp0.source()));
            }
            let _ = writeln!(w, "        </initialConditions>");
        }
        let _ = writeln!(w, "        <storeResults>");
        if let Some(store) = &step.pde.store {
            let _ = writeln!(
                w,
                "          <nodeResult type=\"{PRESSURE_RESULT}\" saveEvery=\"{}\"/>",
                store.save_every
            );
        }
        let _ = writeln!(w, "        </storeResults>");
        let _ = writeln!(w, "      </acoustic>");
        let _ = writeln!(w, "    </pdeList>");
        let _ = writeln!(w, "  </sequenceStep>");
    }
    let _ = writeln!(w, "</cfsSimulation>");
    s
}
