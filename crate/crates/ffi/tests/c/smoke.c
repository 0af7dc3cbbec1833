#include <stdio.h>
#include <string.h>
#include "quekno.h"

int main(void) {
    QkArchitecture *ag = NULL;
    if (qk_architecture_builtin("rochester", &ag) != QK_STATUS_OK) return 1;
    if (qk_architecture_vertex_count(ag) != 53) return 2;

    QkBenchmark *b = NULL;
    const char *spec = "{\"ag_name\":\"rochester\",\"objective\":\"depth\",\"target_cost\":2,"
                       "\"perm_type\":\"parallel\",\"graph_size\":\"small\",\"qbg_ratio\":2.55,\"seed\":3}";
    if (qk_benchmark_generate(spec, &b) != QK_STATUS_OK) {
        fprintf(stderr, "%s\n", qk_last_error());
        return 3;
    }
    size_t cost = 0;
    double rho = 0.0;
    qk_benchmark_known(b, &cost, &rho);
    if (cost != 2 || rho < 1.0) return 4;

    QkCircuit *c = NULL;
    char *meta = NULL;
    char *report = NULL;
    qk_benchmark_circuit(b, &c);
    qk_benchmark_metadata_json(b, &meta);
    if (qk_replay_metadata_json(c, ag, meta, &report) != QK_STATUS_OK) return 5;
    if (strstr(report, "\"valid\":true") == NULL) return 6;

    QkArchitecture *none = NULL;
    if (qk_architecture_builtin("nowhere", &none) != QK_STATUS_INVALID_ARGUMENT) return 7;
    if (strlen(qk_last_error()) == 0) return 8;

    qk_string_free(report);
    qk_string_free(meta);
    qk_circuit_free(c);
    qk_benchmark_free(b);
    qk_architecture_free(ag);
    printf("ok\n");
    return 0;
}
