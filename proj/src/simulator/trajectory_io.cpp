#include <string>

#include "motobs/io/csv.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

const char* const kTrajectoryHeader =
    "t,psi,phi,delta,vx,vy,dpsi,dphi,ddelta,dthf,dthr,Ffx,Frx,Ffy,Fry,ax,ay";

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_number(traj.t[k]);
    for (int i = 0; i < 14; ++i) {
      out += ',';
      out += format_number(traj.X[k](i));
    }
    out += ',';
    out += format_number(traj.ax[k]);
    out += ',';
    out += format_number(traj.ay[k]);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  write_text_file(path, trajectory_csv(traj));
}

}  // namespace motobs
