/* Small target for the Frama-C adapter: the loop bound and the merge after
   the branch are what slevel and loop unrolling can resolve. */
int buf[16];

int main(void) {
  int sum = 0;
  for (int i = 0; i < 16; i++) {
    int step = (i % 2 == 0) ? 1 : -1;
    buf[i] = step;
    sum += buf[i];
  }
  return buf[sum + 8];
}
