#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stylelab {

// Exit codes shared by every subcommand; stable for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

struct GenCorpusArgs {
    std::string style;
    int persons = 10;
    int backgrounds = 10;
    uint64_t seed = 0;
    std::string out;
    std::string role = "styleref";
    std::string identifier = "[V]";
    bool force = false;
};

struct PretrainArgs {
    std::string out;
    std::string tower_out;  // optional
    int persons = 160;
    int backgrounds = 160;
    int ae_steps = 1200;
    int ldm_steps = 4000;
    int tower_steps = 1500;
    uint64_t seed = 11;
    bool force = false;
};

struct TrainArgs {
    std::string mode = "single";
    std::string styleref;   // D1 in multi mode
    std::string styleref2;  // D2 in multi mode
    std::string aux;        // unused in dreambooth mode
    std::string init;
    std::string out;
    double lambda = 1.0;
    int steps = -1;  // -1 = mode default (500; multi doubles it)
    double lr = 1e-4;
    uint64_t seed = 1;
    int batch = 1;
    int ckpt_every = 100;
    bool force = false;
};

struct SampleArgs {
    std::string ckpt;
    std::string prompt;
    int n = 6;
    int steps = 30;
    double cfg = 7.5;
    uint64_t seed = 0;
    std::string out;
    bool force = false;
};

struct StylizeArgs {
    std::string ckpt;
    std::string input;
    std::string prompt;
    double t0 = 0.6;
    int steps = 30;
    double cfg = 7.5;
    uint64_t seed = 0;
    std::string out;
};

struct EvaluateArgs {
    std::string generated;
    std::string reference;
    std::string tower;  // optional; alignment column is 0 without it
    std::string out;    // metrics.csv
    uint64_t feature_seed = 90210;
    std::string checkpoint_id = "";
};

struct SweepArgs {
    std::string run_dir;
    std::string reference;
    std::string tower;
    std::string out;  // metrics.csv
    int prompts = 40;
    uint64_t prompt_seed = 123;
    std::string prompt_mode = "single";
    int images_per_prompt = 2;
    int steps = 30;
    double cfg = 7.5;
    uint64_t seed = 0;
    uint64_t feature_seed = 90210;
};

struct InspectAttnArgs {
    std::string ckpt;
    std::string prompt = "a photo of [V] style";
    uint64_t scene_seed = 0;  // person scene rendered for inspection
    std::string style;        // optional transform applied to the scene
    std::string timesteps = "50,100,150";
    std::string out;
    uint64_t seed = 0;
    bool force = false;
};

int cmd_gen_corpus(const GenCorpusArgs& a);
int cmd_pretrain(const PretrainArgs& a);
int cmd_train(const TrainArgs& a);
int cmd_sample(const SampleArgs& a);
int cmd_stylize(const StylizeArgs& a);
int cmd_evaluate(const EvaluateArgs& a);
int cmd_sweep(const SweepArgs& a);
int cmd_inspect_attn(const InspectAttnArgs& a);

// Full argv path: parses flags (plus optional --config file whose
// [command] section supplies defaults), maps exceptions to exit codes.
int run_cli(const std::vector<std::string>& args);

}  // namespace stylelab
