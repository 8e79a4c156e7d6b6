// Copyright 2026 The cablequad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CABLEQUAD_CHECKPOINT_HPP_
#define CABLEQUAD_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cablequad/network.hpp"

namespace cablequad {

// Checkpoint layout: magic "RVFLY1", u64 LE manifest byte length, manifest
// as UTF-8 text (spec line then one "name offset rows cols" line per
// parameter), u64 LE parameter count, raw little-endian doubles.
inline constexpr char kCheckpointMagic[6] = {'R', 'V', 'F', 'L', 'Y', '1'};

inline std::string checkpoint_manifest_text(const PolicyParams& p) {
    const NetworkSpec& s = p.spec();
    std::ostringstream os;
    os << "spec " << s.present_dim << ' ' << s.history_dim << ' '
       << s.preview_dim << ' ' << s.enc_hist << ' ' << s.enc_prev << ' '
       << s.trunk << ' ' << s.action_dim << '\n';
    for (const ParamShape& ps : p.manifest())
        os << ps.name << ' ' << ps.offset << ' ' << ps.rows << ' ' << ps.cols
           << '\n';
    return os.str();
}

inline void save_checkpoint(const PolicyParams& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    std::string manifest = checkpoint_manifest_text(p);
    std::uint64_t mlen = manifest.size();
    f.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
    f.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
    std::uint64_t n = static_cast<std::uint64_t>(p.size());
    f.write(reinterpret_cast<const char*>(&n), sizeof(n));
    f.write(reinterpret_cast<const char*>(p.flat().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline PolicyParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[6];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);

    std::uint64_t mlen = 0;
    f.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
    if (!f || mlen > (1u << 20))
        throw std::runtime_error("load_checkpoint: corrupt manifest length");
    std::string manifest(mlen, '\0');
    f.read(manifest.data(), static_cast<std::streamsize>(mlen));

    std::istringstream ms(manifest);
    std::string tag;
    NetworkSpec spec;
    ms >> tag;
    if (tag != "spec")
        throw std::runtime_error("load_checkpoint: manifest missing spec line");
    ms >> spec.present_dim >> spec.history_dim >> spec.preview_dim >>
        spec.enc_hist >> spec.enc_prev >> spec.trunk >> spec.action_dim;

    PolicyParams p(spec);

    // Validate the stored manifest against the reconstructed layout.
    for (const ParamShape& ps : p.manifest()) {
        std::string name;
        long offset, rows, cols;
        if (!(ms >> name >> offset >> rows >> cols))
            throw std::runtime_error("load_checkpoint: manifest truncated");
        if (name != ps.name || offset != ps.offset || rows != ps.rows ||
            cols != ps.cols)
            throw std::runtime_error("load_checkpoint: manifest mismatch at " +
                                     name);
    }

    std::uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (!f || n != static_cast<std::uint64_t>(p.size()))
        throw std::runtime_error("load_checkpoint: parameter count mismatch");
    f.read(reinterpret_cast<char*>(p.flat().data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw std::runtime_error("load_checkpoint: truncated data");
    return p;
}

}  // namespace cablequad

#endif  // CABLEQUAD_CHECKPOINT_HPP_
