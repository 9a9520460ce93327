//! gnuplot scripts for the CSV artifacts. Each script reads its CSV from the
//! same directory and writes a PNG next to it.

pub fn stiffness(operating_max_deg: f64, safety_max_deg: f64) -> String {
    format!(
        r#"# torque-angle characterization and fitted law
set datafile separator ","
set terminal pngcairo size 900,600
set output "stiffness.png"
set xlabel "compression angle (deg)"
set ylabel "torque (N·m)"
set key top left
set arrow from {op:.3}, graph 0 to {op:.3}, graph 1 nohead dt 2
set arrow from {sf:.3}, graph 0 to {sf:.3}, graph 1 nohead dt 3
set label "operating" at graph 0.05, graph 0.9
set label "densification" at {sf:.3}, graph 0.9 offset 1,0
plot "stiffness_curve.csv" using 1:2 with points pt 7 ps 0.6 title "data", \
     "" using 1:3 with lines lw 2 title "cubic fit"
"#,
        op = operating_max_deg,
        sf = safety_max_deg
    )
}

pub fn trajectory(files: &[(String, String)]) -> String {
    let mut s = String::from(
        r#"# trunk height during the jump
set datafile separator ","
set terminal pngcairo size 900,600
set output "trajectory.png"
set xlabel "time (s)"
set ylabel "height (m)"
set key bottom right
plot "#,
    );
    let parts: Vec<String> = files
        .iter()
        .map(|(title, file)| format!("\"{file}\" using 1:2 with lines lw 2 title \"{title}\""))
        .collect();
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn mechanism() -> String {
    r#"# flip mechanism energy landscape
set datafile separator ","
set terminal pngcairo size 900,600
set output "mechanism.png"
set xlabel "push-rod position (mm)"
set ylabel "energy (mJ)"
set y2label "force (N)"
set y2tics
set ytics nomirror
plot "mechanism_sweep.csv" using 1:3 with lines lw 2 title "U", \
     "" using 1:4 axes x1y2 with lines lw 1 dt 2 title "F"
"#
    .to_string()
}
