public class MinimumCost {
    public static int main(String[] args) {
        int[] target = {3, 1, 4, 4, 2};
        int free = 0;
        int req = 0;
        for (int i = 0; i < target.length; i++) {
            if (target[i] > free) {
                req += target[i] - free;
                free = target[i];
            } else if (target[i] < free) {
                free = target[i];
            }
        }
        return req;
    }
}
