#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(TFIM_CLI_PATH) + " " + args + " > cli_stdout.txt 2>cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_spec(const std::string& path, int n, double hi, double hf, const std::string& tlist) {
    std::ofstream out(path);
    out << "n = " << n << "\nj = 1\nh_i = " << hi << "\nh_f = " << hf << "\nt_list = " << tlist
        << "\n";
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("correlate") == 1);
    CHECK(run_cli("frobnicate --config x") == 1);
}

TEST_CASE("correlate: exact method emits a schema-stable CSV") {
    write_spec("cli_spec.conf", 8, 1000.0, 1.1, "0,0.5,1");
    CHECK(run_cli("correlate --config cli_spec.conf --method exact --out cli_out.csv") == 0);
    std::string body = slurp("cli_out.csv");
    CHECK(body.find("# tfim-quench schema=1") == 0);
    CHECK(body.find("# columns: t,d,value,stderr,method") != std::string::npos);
    CHECK(body.find("# h_f = 1.1") != std::string::npos);
    // one row per (t, d) pair
    std::size_t rows = 0;
    for (char c : body)
        if (c == '\n') ++rows;
    CHECK(body.find(",exact") != std::string::npos);
    std::remove("cli_spec.conf");
    std::remove("cli_out.csv");
}

TEST_CASE("rerunning a dtwa config reproduces the file bit for bit") {
    write_spec("cli_spec2.conf", 6, 1000.0, 1.2, "0,0.5");
    std::string flags =
        "correlate --config cli_spec2.conf --method dtwa --samples 200 --seed 9 --out ";
    CHECK(run_cli(flags + "cli_a.csv --threads 1") == 0);
    CHECK(run_cli(flags + "cli_b.csv --threads 3") == 0);
    CHECK(slurp("cli_a.csv") == slurp("cli_b.csv"));
    CHECK(!slurp("cli_a.csv").empty());
    std::remove("cli_spec2.conf");
    std::remove("cli_a.csv");
    std::remove("cli_b.csv");
}

TEST_CASE("ed method rejects chains beyond the oracle limit with exit 2") {
    write_spec("cli_spec3.conf", 20, 1000.0, 1.1, "0,0.5");
    CHECK(run_cli("correlate --config cli_spec3.conf --method ed --out cli_c.csv") == 2);
    std::remove("cli_spec3.conf");
}

TEST_CASE("scan over epsilon emits xi1 and the crossover column") {
    write_spec("cli_spec4.conf", 16, 1000.0, 1.1, "2");
    CHECK(run_cli("scan --config cli_spec4.conf --scan epsilon --values 0.1,9 --method exact "
                  "--analysis xi1,gge --out cli_scan.csv") == 0);
    std::string body = slurp("cli_scan.csv");
    CHECK(body.find("# columns: epsilon,xi1,xi1_err,xi_gge,status") != std::string::npos);
    CHECK(body.find("ok") != std::string::npos);
    std::remove("cli_spec4.conf");
    std::remove("cli_scan.csv");
}

TEST_CASE("per-point scan failures are recorded in-row and the run continues") {
    write_spec("cli_spec5.conf", 16, 1000.0, 1.1, "2");
    // epsilon = -1 gives h_f = 0: valid spec, but the xi1 fit at t=2 in the
    // ferromagnetic quench may fail; epsilon = -2 gives a negative field
    CHECK(run_cli("scan --config cli_spec5.conf --scan epsilon --values -2,0.1 --method exact "
                  "--analysis xi1 --out cli_scan2.csv") == 0);
    std::string body = slurp("cli_scan2.csv");
    CHECK(body.find("nonnegative") != std::string::npos);  // in-row error text
    CHECK(body.find("ok") != std::string::npos);           // second point still ran
    std::remove("cli_spec5.conf");
    std::remove("cli_scan2.csv");
}

TEST_CASE("samples scan emits the plateau table and its power-law fit") {
    write_spec("cli_spec7.conf", 50, 1000.0, 1.0001, "0");
    CHECK(run_cli("scan --config cli_spec7.conf --scan samples --values 100,400,1600 "
                  "--method dtwa --seed 4 --analysis plateau --out cli_scan3.csv") == 0);
    std::string body = slurp("cli_scan3.csv");
    CHECK(body.find("# columns: samples,plateau,plateau_std,status") != std::string::npos);
    CHECK(body.find("# power-law-fit a=") != std::string::npos);
    std::remove("cli_spec7.conf");
    std::remove("cli_scan3.csv");
}

TEST_CASE("json mirror is written next to the csv") {
    write_spec("cli_spec6.conf", 6, 1000.0, 1.2, "0");
    CHECK(run_cli("correlate --config cli_spec6.conf --method exact --out cli_d.csv --json") == 0);
    std::string js = slurp("cli_d.csv.json");
    CHECK(js.find("\"schema\": 1") != std::string::npos);
    CHECK(js.find("\"rows\"") != std::string::npos);
    std::remove("cli_spec6.conf");
    std::remove("cli_d.csv");
    std::remove("cli_d.csv.json");
}

TEST_CASE("residual columns and light-cone comment are emitted on request") {
    write_spec("cli_spec8.conf", 8, 1000.0, 1.2, "0,0.5,1,1.5,2");
    CHECK(run_cli("correlate --config cli_spec8.conf --method dtwa --samples 300 --seed 3 "
                  "--residuals-vs exact --light-cone --out cli_res.csv") == 0);
    std::string body = slurp("cli_res.csv");
    CHECK(body.find("# columns: t,d,value,stderr,method,delta,ratio,ref_zero") !=
          std::string::npos);
    CHECK(body.find("# light-cone-velocity") != std::string::npos);
    std::remove("cli_spec8.conf");
    std::remove("cli_res.csv");
}

TEST_CASE("verify --quick runs the fast subset end to end") {
    CHECK(run_cli("verify --quick") == 0);
    std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("[PASS]") != std::string::npos);
}
