#include <stdio.h>
#include <string.h>

#include "ntnlink.h"

int main(void) {
    NtnLink *link = NULL;
    if (ntn_link_from_json("{\"rf\": {\"preset\": \"LS\"}}", &link) != NTN_STATUS_OK) {
        fprintf(stderr, "create: %s\n", ntn_last_error());
        return 1;
    }
    double op = -1.0, ber = -1.0;
    if (ntn_outage_probability(link, 30.0, &op) != NTN_STATUS_OK || !(op > 0.0 && op < 1.0)) {
        return 2;
    }
    if (ntn_avg_ber(link, "ook", 30.0, &ber) != NTN_STATUS_INVALID_ARGUMENT || ntn_last_error() == NULL) {
        return 3;
    }
    if (ntn_avg_ber(link, "bpsk", 30.0, &ber) != NTN_STATUS_OK || !(ber > 0.0 && ber < 0.5)) {
        return 4;
    }
    ntn_link_free(link);
    printf("%.17g %.17g %s\n", op, ber, ntn_version());
    return 0;
}
