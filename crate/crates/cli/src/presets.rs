//! Bundled sweep configurations for the standard scans.

pub const NAMES: &[&str] = &["fig1a", "fig1b", "fig1c", "fig2", "fig3a", "fig3b"];

const FIG1A: &str = "\
# Steady-state coherence vs coupling strength, thermal bath.
[system]
n_qubits = 2
omegas = 1, 1
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.05
bandwidth = 5
temperature = 15
omega0 = 1

[integrator]
dt = 0.01
t_max = 200
sample_every = 10

[sweep]
axis = Gamma
start = 0.005
stop = 0.3
count = 30
";

const FIG1B: &str = "\
# Steady-state coherence vs temperature, thermal bath.
[system]
n_qubits = 2
omegas = 1, 1
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.05
bandwidth = 5
temperature = 15
omega0 = 1

[integrator]
dt = 0.01
t_max = 200
sample_every = 10

[sweep]
axis = T
start = 1
stop = 40
count = 40
";

const FIG1C: &str = "\
# Steady-state coherence vs bath bandwidth, thermal bath.
[system]
n_qubits = 2
omegas = 1, 1
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.05
bandwidth = 5
temperature = 15
omega0 = 1

[integrator]
dt = 0.005          # keeps dt * gamma <= 0.1 up to gamma = 20
t_max = 200
sample_every = 20

[sweep]
axis = gamma
start = 0.5
stop = 20
count = 40
";

const FIG2: &str = "\
# Steady-state coherence over squeezing strength and phase (21 x 21 grid).
[system]
n_qubits = 2
omegas = 1, 1
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.04
bandwidth = 3
temperature = 8
omega0 = 1

[squeeze]
r = 0.4
theta = pi/2

[integrator]
dt = 0.01
t_max = 200
sample_every = 10

[sweep]
axis = r
start = 0
stop = 1
count = 21
outer_axis = theta
outer_start = 0
outer_stop = pi
outer_count = 21
";

const FIG3A: &str = "\
# Squeezed bath, coherence vs coupling strength.
# Drop the [squeeze] section for the thermal-bath comparison.
[system]
n_qubits = 2
omegas = 0.5, 0.5
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.04
bandwidth = 3
temperature = 6
omega0 = 0.5

[squeeze]
r = 0.4
theta = pi/2

[integrator]
dt = 0.01
t_max = 200
sample_every = 10

[sweep]
axis = Gamma
start = 0.01
stop = 0.3
count = 30
";

const FIG3B: &str = "\
# Squeezed bath, coherence vs temperature.
# Drop the [squeeze] section for the thermal-bath comparison.
[system]
n_qubits = 2
omegas = 0.5, 0.5
initial_state = gg
regime = nonmarkovian

[bath]
coupling = 0.04
bandwidth = 3
temperature = 6
omega0 = 0.5

[squeeze]
r = 0.4
theta = pi/2

[integrator]
dt = 0.01
t_max = 200
sample_every = 10

[sweep]
axis = T
start = 1
stop = 40
count = 40
";

/// Configuration text of a named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1a" => FIG1A,
        "fig1b" => FIG1B,
        "fig1c" => FIG1C,
        "fig2" => FIG2,
        "fig3a" => FIG3A,
        "fig3b" => FIG3B,
        _ => return None,
    })
}
