/** Example algorithm sources for the template picker. */

export interface Template {
  name: string;
  mode: "simulate" | "verify";
  qasm: string;
  qasm2?: string;
}

const BELL = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q[0] -> c[0];
measure q[1] -> c[1];
`;

const GHZ = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[0];
cx q[0],q[1];
cx q[0],q[2];
`;

const QFT3 = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[2];
cp(pi/2) q[1],q[2];
cp(pi/4) q[0],q[2];
h q[1];
cp(pi/2) q[0],q[1];
h q[0];
swap q[0],q[2];
`;

const QFT3_COMPILED = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[2];
barrier q;
p(pi/4) q[2];
cx q[2],q[1];
p(-pi/4) q[1];
cx q[2],q[1];
p(pi/4) q[1];
barrier q;
p(pi/8) q[2];
cx q[2],q[0];
p(-pi/8) q[0];
cx q[2],q[0];
p(pi/8) q[0];
barrier q;
h q[1];
barrier q;
p(pi/4) q[1];
cx q[1],q[0];
p(-pi/4) q[0];
cx q[1],q[0];
p(pi/4) q[0];
barrier q;
h q[0];
barrier q;
cx q[2],q[0];
cx q[0],q[2];
cx q[2],q[0];
`;

const GROVER_2 = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
x q[2];
h q[2];
h q[0];
h q[1];
x q[0];
x q[1];
ccx q[0],q[1],q[2];
x q[0];
x q[1];
h q[0];
h q[1];
x q[0];
x q[1];
cz q[1],q[0];
x q[0];
x q[1];
h q[0];
h q[1];
`;

export const TEMPLATES: Template[] = [
  { name: "Bell state (with measurement)", mode: "simulate", qasm: BELL },
  { name: "GHZ state (3 qubits)", mode: "simulate", qasm: GHZ },
  { name: "QFT (3 qubits)", mode: "simulate", qasm: QFT3 },
  { name: "Grover search (2 qubits)", mode: "simulate", qasm: GROVER_2 },
  {
    name: "Verify: QFT3 vs compiled QFT3",
    mode: "verify",
    qasm: QFT3,
    qasm2: QFT3_COMPILED,
  },
];
