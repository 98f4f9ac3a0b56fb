#pragma once

#include <complex>
#include <map>
#include <string>

#include "mtlnet/cable.hpp"
#include "mtlnet/linalg.hpp"
#include "mtlnet/network.hpp"

// Reference computations that share no code with the library's modal solver.
namespace oracle {

using mtlnet::CMatrix;
using mtlnet::Complex;

struct ScalarLine {
  Complex gamma;
  Complex zc;
};

/// gamma = sqrt(z y), Z_C = sqrt(z / y) for per-unit-length r, l, g, c.
ScalarLine scalar_line(double r, double l, double g, double c, double f);

/// Z_in = Z_C (Z_L + Z_C tanh(gamma l)) / (Z_C + Z_L tanh(gamma l)).
Complex tanh_input_impedance(const ScalarLine& line, Complex z_load, double length);

/// Voltage transfer of a terminated scalar line from forward/backward waves.
Complex scalar_ctf(const ScalarLine& line, Complex z_load, double length);

/// Chain matrix exp([[0, -Z], [-Y, 0]] l) mapping [V(0); I(0)] to [V(l); I(l)].
CMatrix chain_matrix(const mtlnet::PulParameters& p, double f, double length);

/// Two-port admittance blocks of a line from its chain matrix (currents into the line).
struct LineAdmittance {
  CMatrix y00, y0l, yl0, yll;
};
LineAdmittance line_admittance(const mtlnet::PulParameters& p, double f, double length);

/// Y_in of a line terminated in y_load, via the chain matrix.
CMatrix chain_input_admittance(const mtlnet::PulParameters& p, double f, double length, const CMatrix& y_load);

/// Nodal analysis of a whole tree network at one frequency.
class NodalNetwork {
 public:
  NodalNetwork(const mtlnet::NetworkTopology& net, double f);

  /// Admittance seen into the network at `port`'s node with that node's load removed.
  CMatrix input_admittance(const std::string& port) const;
  /// V_rx / E with the transmitter driven through its port admittance (its load removed).
  CMatrix ctf_source(const std::string& tx_port, const std::string& rx_node) const;
  /// V_rx V_tx^{-1} for the same excitation.
  CMatrix ctf_node(const std::string& tx_port, const std::string& rx_node) const;

 private:
  CMatrix system(const std::string& excluded_load_node) const;
  std::pair<CMatrix, CMatrix> drive(const std::string& tx_port, const std::string& rx_node) const;

  const mtlnet::NetworkTopology& net_;
  double f_;
  int n_;
  std::map<std::string, int> index_;
  CMatrix y_lines_;
};

}  // namespace oracle
