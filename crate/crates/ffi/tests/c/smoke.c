#include <math.h>
#include <stdio.h>

#include "antires.h"

int main(void) {
    AntiresNetwork *net = NULL;
    if (antires_network_atom_cavity(16.0, 3.0, 1.5, -3.0, &net) != ANTIRES_STATUS_OK) {
        return 1;
    }
    AntiresFeature zeros[4];
    size_t count = 0;
    if (antires_antiresonances(net, "cavity", zeros, 4, &count) != ANTIRES_STATUS_OK || count != 1) {
        return 2;
    }
    if (fabs(zeros[0].center_mhz + 3.0) > 1e-12 || fabs(zeros[0].half_width_mhz - 3.0) > 1e-12) {
        return 3;
    }
    if (antires_antiresonances(net, "nowhere", zeros, 4, &count) != ANTIRES_STATUS_UNKNOWN_MODE) {
        return 4;
    }
    printf("%s\n", antires_last_error_message());
    antires_network_free(net);
    return 0;
}
