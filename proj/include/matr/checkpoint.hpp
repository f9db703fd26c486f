#ifndef MATR_CHECKPOINT_HPP
#define MATR_CHECKPOINT_HPP

#include <map>
#include <optional>
#include <string>

#include "matr/array.hpp"
#include "matr/optimizer.hpp"

namespace matr {

/*
 * Checkpoint file: "MATRCKP1" magic, format version, the model config
 * as a JSON blob, then a flat name -> (shape, float64 payload) map,
 * optionally followed by AdamW state. All integers and floats are
 * little-endian.
 */
struct Checkpoint {
    std::string config_json;
    std::vector<std::pair<std::string, Var>> params; // insertion order preserved
    std::optional<int64_t> optimizer_step;
    std::vector<AdamW::Slot> optimizer_slots;
};

void save_checkpoint(const std::string& path, const std::string& config_json,
                     const ParamSet& params, const AdamW* optimizer = nullptr);

Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint payloads into an existing parameter set; throws on
// any missing name or shape mismatch.
void assign_params(ParamSet& params, const Checkpoint& ckpt);

} // namespace matr

#endif
