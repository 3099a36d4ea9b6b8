#include <math.h>
#include <stdio.h>
#include "photonic_vqa.h"

int main(void) {
    PvCostModel *h2 = NULL;
    if (pv_cost_model_h2(0.736, &h2) != PV_STATUS_OK) return 1;
    double theta = 0.0, e = 0.0, se = -1.0;
    if (pv_cost_model_evaluate(h2, &theta, 1, 1.0, &e, &se) != PV_STATUS_OK) return 2;
    if (fabs(e + 1.1168) > 5e-4 || se != 0.0) return 3;
    pv_cost_model_free(h2);

    PvCostModel *bad = NULL;
    if (pv_cost_model_h2(0.75, &bad) != PV_STATUS_LOOKUP_FAILED || bad != NULL) return 4;
    if (pv_last_error_message()[0] == '\0') return 5;

    int64_t w[16];
    if (pv_vqf_coefficients(35, w) != PV_STATUS_OK || w[0] != 546 || w[15] != 16) return 6;
    printf("ok %s\n", pv_version());
    return 0;
}
